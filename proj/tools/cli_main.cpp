// Command-line front end: list the model catalog, run verification suites,
// and summarize stored report files.
//
// Exit codes: 0 all checks passed, 1 failures (or no reports to summarize),
// 2 configuration/usage errors. SOLITON_ENTROPY_OUT overrides --out.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <soliton_entropy/suites.hpp>

namespace se = soliton_entropy;

namespace {

std::string resolve_out_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("SOLITON_ENTROPY_OUT"); env && *env) return env;
  return flag_value;
}

const char* invariant_name(se::SolitonKind k) {
  switch (k) {
    case se::SolitonKind::Shrinking: return "mu_s";
    case se::SolitonKind::Expanding: return "mu_e";
    default: return "lambda";
  }
}

int cmd_list() {
  std::printf("%-44s %-10s %4s  %-7s %s\n", "model", "kind", "dim", "invariant",
              "value");
  for (const auto& id : se::catalog_ids()) {
    const se::SolitonModel m = se::make_model(id);
    std::printf("%-44s %-10s %4d  %-7s % .12g\n", id.c_str(),
                se::to_string(m.kind).c_str(), m.total_dim, invariant_name(m.kind),
                se::mu_invariant(m));
  }
  return 0;
}

int cmd_verify(se::RunConfig cfg) {
  cfg.out_dir = resolve_out_dir(cfg.out_dir);
  se::SuiteReport sr;
  try {
    sr = se::run_verify(cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::printf("%-26s %-28s %-34s %-14s %12s\n", "check", "model", "density", "verdict",
              "gap");
  for (const auto& r : sr.checks) {
    std::printf("%-26s %-28s %-34s %-14s %12.4g\n", r.check_id.c_str(), r.model.c_str(),
                r.density.substr(0, 34).c_str(), se::to_string(r.verdict), r.gap);
  }
  std::printf("\n%d passed, %d failed, %d not applicable\n", sr.n_pass, sr.n_fail,
              sr.n_na);
  if (!cfg.out_dir.empty()) {
    const auto path = std::filesystem::path(cfg.out_dir) / "report.json";
    se::write_suite_report(sr, path);
    std::printf("report written to %s\n", path.string().c_str());
  }
  return sr.all_passed() ? 0 : 1;
}

int cmd_report(std::string dir) {
  dir = resolve_out_dir(dir);
  return se::render_report_table(se::load_reports(dir), std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of sharp entropy inequalities on "
               "gradient soliton model geometries"};
  app.require_subcommand(1);

  app.add_subcommand("list", "print the model catalog with invariant values");

  se::RunConfig cfg;
  auto* verify = app.add_subcommand("verify", "run a check suite and write reports");
  verify->add_option("--models", cfg.models,
                     "comma-separated model ids (default: whole catalog)")
      ->delimiter(',');
  verify->add_option("--suite", cfg.suite, "identities|lsi|hwi|flow|volume|all")
      ->capture_default_str();
  verify->add_option("--resolution", cfg.resolution, "quadrature node budget per axis")
      ->capture_default_str();
  verify->add_option("--cutoff", cfg.cutoff, "radial cutoff (0 = automatic)")
      ->capture_default_str();
  verify->add_option("--dt", cfg.dt, "flow trace time step")->capture_default_str();
  verify->add_option("--horizon", cfg.horizon, "flow trace length")
      ->capture_default_str();
  verify->add_option("--tol", cfg.tol, "tolerance floor for bound checks")
      ->capture_default_str();
  verify->add_option("--seed", cfg.seed, "seed for density families")
      ->capture_default_str();
  verify->add_option("--out", cfg.out_dir, "output directory ('' = no files)")
      ->capture_default_str();
  verify->add_option("--jobs", cfg.jobs, "worker threads (0 = hardware)")
      ->capture_default_str();

  std::string report_dir = "reports";
  auto* report = app.add_subcommand("report", "summarize stored report files");
  report->add_option("--out", report_dir, "directory holding report json files")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("verify")) return cmd_verify(std::move(cfg));
    return cmd_report(std::move(report_dir));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
