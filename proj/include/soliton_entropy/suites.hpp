#pragma once

// Named check suites over the model catalog, and the runner shared by the
// CLI and the acceptance harness.
//
// A suite maps each model to a fixed list of checks; run_verify executes
// every (model, suite-part) cell on a small thread pool and assembles the
// reports in deterministic task order, so two runs with equal configs
// produce byte-identical JSON apart from the timestamp. Checks whose
// hypotheses a model does not satisfy come back NotApplicable, never as
// errors.
//
// Trace-style checks (dissipation, decay) follow the configured dt and
// horizon. Scheme-accuracy checks (fixed point, closed form, refinement
// order) always run at the reference discretization dt = 2e-4 and at least
// 512 cells: their tolerances certify the scheme, not the user's trace.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "catalog.hpp"
#include "density.hpp"
#include "flow.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "report.hpp"
#include "transport.hpp"
#include "volume.hpp"

namespace soliton_entropy {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"identities", "lsi", "hwi",
                                                 "flow",       "volume", "all"};
  return names;
}

// tau-rescaled copy of a shrinker: metric g -> c g, tau -> c tau. The sharp
// entropy value is scale-invariant, which tau-invariance checks exploit.
inline SolitonModel with_tau(const SolitonModel& m, double t) {
  if (m.kind != SolitonKind::Shrinking)
    throw std::invalid_argument("with_tau: only shrinkers carry a scale");
  if (!(t > 0.0)) throw std::invalid_argument("with_tau: tau must be positive");
  const double c = t / m.tau;
  const double rc = std::sqrt(c);
  std::vector<GeometryFactor> fs = m.factors;
  for (auto& f : fs) {
    if (auto* g = std::get_if<FlatGaussian>(&f)) {
      g->quadratic_scale /= c;
      for (double& b : g->tilt) b /= rc;
    } else if (auto* g = std::get_if<RoundSphere>(&f)) {
      g->radius *= rc;
    } else if (auto* g = std::get_if<AbstractEinstein>(&f)) {
      g->scalar_curv /= c;
      g->volume *= std::pow(c, 0.5 * g->dim);
      g->diameter *= rc;
    } else {
      throw std::invalid_argument("with_tau: factor does not scale");
    }
  }
  return assemble_model(m.kind, std::move(fs), t, m.id);
}

namespace detail {

struct TaskOutput {
  std::vector<FunctionalReport> reports;
  std::vector<std::pair<std::string, std::string>> artifacts;  // filename, bytes
};

inline std::string artifact_stem(const std::string& model_id) {
  std::string s;
  s.reserve(model_id.size());
  for (char ch : model_id)
    s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '-';
  return s;
}

inline QuadratureGrid config_grid(const SolitonModel& m, const RunConfig& cfg) {
  GridResolution res;
  res.radial = cfg.resolution;
  res.cutoff = cfg.cutoff;
  return build_grid(m, res);
}

inline bool has_flat_factor(const SolitonModel& m) {
  for (const auto& f : m.factors)
    if (std::holds_alternative<FlatGaussian>(f)) return true;
  return false;
}

inline bool single_flat_factor(const SolitonModel& m) {
  return m.factors.size() == 1 && std::holds_alternative<FlatGaussian>(m.factors[0]);
}

inline FunctionalReport base_report(const char* id, const SolitonModel& m,
                                    const GridCertificate& cert) {
  FunctionalReport r;
  r.check_id = id;
  r.model = m.id;
  r.density = "reference";
  r.sigma = m.tau;
  r.grid = cert;
  return r;
}

// equality-style fill: pass iff |value - target| <= tol
inline void set_equality(FunctionalReport& r, double value, double target, double tol) {
  r.value = value;
  r.bound = target;
  r.tolerance = tol;
  r.gap = tol - std::abs(value - target);
  r.verdict = verdict_from_gap(r.gap, 0.0);
}

// bound-style fill: pass iff value >= bound - tol
inline void set_lower_bound(FunctionalReport& r, double value, double bound, double tol) {
  r.value = value;
  r.bound = bound;
  r.tolerance = tol;
  r.gap = value - bound;
  r.verdict = verdict_from_gap(r.gap, tol);
}

// residual-style fill: pass iff value <= bound
inline void set_residual(FunctionalReport& r, double value, double bound) {
  r.value = value;
  r.bound = bound;
  r.tolerance = 0.0;
  r.gap = bound - value;
  r.verdict = verdict_from_gap(r.gap, 0.0);
}

// ---------------------------------------------------------------------------
// identities: generating identity, minimizer identities, invariant signs.

inline void run_identities(const SolitonModel& m, const RunConfig& cfg, TaskOutput& out) {
  const QuadratureGrid g = config_grid(m, cfg);
  const GridCertificate cert = grid_certificate(g);
  const double mu = mu_invariant(m);
  const double tol8 = std::max(cfg.tol, 1e-8);

  {
    auto r = base_report("soliton-residual", m, cert);
    r.density = "--";
    set_residual(r, soliton_residual(m, sample_points(m, 64)), 1e-10);
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("minimizer-identity", m, cert);
    set_residual(r, minimizer_identity_residual(m, g), 1e-10);
    out.reports.push_back(std::move(r));
  }

  const auto mf = model_fields(m, g);
  const auto ev = evaluate_density(m, g, reference_density(m), true);
  {
    auto r = base_report("reference-mass", m, cert);
    set_equality(r, integrate(g, ev.rho), 1.0, 1e-10);
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("reference-entropy", m, cert);
    set_equality(r, relative_entropy(m, g, ev, mf), 0.0, 1e-10);
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("reference-fisher", m, cert);
    set_equality(r, fisher_information(m, g, ev, mf), 0.0, 1e-10);
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("w-at-minimizer", m, cert);
    set_equality(r, perelman_w(m, g, ev, mf, m.tau), -mu, tol8);
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("el-minimizer", m, cert);
    set_residual(r, el_residual(m, g, reference_density(m), m.tau),
                 std::max(cfg.tol, 1e-8));
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("f-moment", m, cert);
    r.value = reference_f_moment(m, g);
    if (m.kind == SolitonKind::Shrinking) {
      r.bound = 0.5 * m.total_dim;
      r.tolerance = tol8;
      r.gap = r.bound - r.value;
      r.verdict = verdict_from_gap(r.gap, tol8);
    }
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("mu-sign", m, cert);
    r.density = "--";
    r.value = mu;
    if (m.kind == SolitonKind::Shrinking ||
        (m.kind == SolitonKind::Expanding && ricci_range(m).min >= -1e-12)) {
      set_lower_bound(r, mu, 0.0, tol8);
    } else if (m.kind == SolitonKind::Steady) {
      // steady invariant is strictly positive (it is S + |grad f|^2 > 0)
      set_lower_bound(r, mu, 0.0, 0.0);
      r.verdict = mu > 0.0 ? Verdict::Pass : Verdict::Fail;
    }
    out.reports.push_back(std::move(r));
  }
  {
    auto r = base_report("tau-invariance", m, cert);
    r.density = "--";
    if (m.kind == SolitonKind::Shrinking) {
      double dev = 0.0;
      for (double t : {0.5 * m.tau, 2.0 * m.tau})
        dev = std::max(dev, std::abs(mu_invariant(with_tau(m, t)) - mu));
      set_residual(r, dev, 1e-10);
    }
    out.reports.push_back(std::move(r));
  }
}

// ---------------------------------------------------------------------------
// lsi: sharp bound at the minimizer and over seeded families, sharp-value
// estimation, scale-shifted bounds, and the two-form integrand agreement.

inline void run_lsi(const SolitonModel& m, const RunConfig& cfg, TaskOutput& out) {
  const QuadratureGrid g = config_grid(m, cfg);
  const GridCertificate cert = grid_certificate(g);
  const double mu = mu_invariant(m);
  const bool steady = m.kind == SolitonKind::Steady;
  const double tol = std::max(cfg.tol, steady ? 1e-6 : 1e-8);

  {  // equality at the minimizer, not merely the bound
    FunctionalReport r = lsi_gap(m, g, reference_density(m), m.tau, tol);
    r.verdict = verdict_from_error(r.gap, tol);
    out.reports.push_back(std::move(r));
  }
  {
    auto fam = seeded_family(m, 100, cfg.seed);
    double min_gap = std::numeric_limits<double>::infinity();
    int worst = -1;
    for (int i = 0; i < static_cast<int>(fam.size()); ++i) {
      Density d = fam[i];
      normalize(m, g, d);
      const FunctionalReport rep = lsi_gap(m, g, d, m.tau, tol);
      if (rep.gap < min_gap) min_gap = rep.gap, worst = i;
    }
    auto r = base_report("lsi-seeded", m, cert);
    r.density = "seeded[100]";
    set_lower_bound(r, min_gap, 0.0, tol);
    r.extra.emplace_back("count", static_cast<double>(fam.size()));
    r.extra.emplace_back("worst_index", static_cast<double>(worst));
    out.reports.push_back(std::move(r));
  }
  if (m.kind == SolitonKind::Expanding) {
    // rigidity: away from the minimizer the inequality is strict
    SeedOptions opt;
    opt.exclude_near_reference = true;
    auto fam = seeded_family(m, 100, cfg.seed + 1, opt);
    double min_gap = std::numeric_limits<double>::infinity();
    for (auto d : fam) {
      normalize(m, g, d);
      min_gap = std::min(min_gap, lsi_gap(m, g, d, m.tau, tol).gap);
    }
    auto r = base_report("lsi-rigidity", m, cert);
    r.density = "seeded-off-minimizer[100]";
    set_lower_bound(r, min_gap, 1e-4, 0.0);
    out.reports.push_back(std::move(r));
  }
  {
    const MuEstimate est = mu_estimate(m, g, m.tau, 200);
    auto r = base_report("mu-estimate", m, cert);
    r.density = est.family;
    set_equality(r, est.value, -mu,
                 std::max(cfg.tol, single_flat_factor(m) ? 1e-8 : 1e-6));
    r.extra.emplace_back("best_param", est.best_param);
    r.extra.emplace_back("evaluations", static_cast<double>(est.evaluations));
    out.reports.push_back(std::move(r));
  }
  for (double sigma : {4.0, 0.5})
    out.reports.push_back(scale_lsi_gap(m, g, reference_density(m), sigma,
                                        std::max(cfg.tol, 1e-8)));
  {
    // rho-form integrand vs the closed-form psi-form, through the gridded
    // finite-difference path; only 1D profile grids support resampling
    Density d = seeded_family(m, 1, cfg.seed)[0];
    normalize(m, g, d);
    auto r = base_report("fisher-form-agreement", m, cert);
    r.density = describe(d);
    try {
      const double closed = fisher_information(m, g, d);
      const double fd = fisher_information_fd(m, g, d);
      const double rel = std::abs(fd - closed) / std::max(1.0, std::abs(closed));
      set_residual(r, rel, 1e-6);
      r.extra.emplace_back("closed_form", closed);
      r.extra.emplace_back("finite_difference", fd);
    } catch (const unsupported_density_error&) {
      // no 1D profile family to resample on; leave NotApplicable
    }
    out.reports.push_back(std::move(r));
  }
}

// ---------------------------------------------------------------------------
// hwi: interpolation inequality on transport-capable models.

inline void run_hwi(const SolitonModel& m, const RunConfig& cfg, TaskOutput& out) {
  const QuadratureGrid g = config_grid(m, cfg);
  const GridCertificate cert = grid_certificate(g);
  const double tol = std::max(cfg.tol, 1e-6);

  {  // canonical wide-Gaussian instance
    Density d;
    d.form = ParamGaussianDensity{2.0, {}};
    normalize(m, g, d);
    out.reports.push_back(hwi_gap(m, g, d, tol));
  }
  {
    auto r = base_report("hwi-seeded", m, cert);
    r.density = "seeded[50]";
    if (detail::single_flat_factor(m)) {
      auto fam = seeded_family(m, 50, cfg.seed);
      double min_hwi = std::numeric_limits<double>::infinity();
      double min_lsi = std::numeric_limits<double>::infinity();
      int worst = -1, available = 0;
      for (int i = 0; i < static_cast<int>(fam.size()); ++i) {
        Density d = fam[i];
        normalize(m, g, d);
        const FunctionalReport rep = hwi_gap(m, g, d, tol);
        if (rep.verdict == Verdict::NotApplicable) continue;
        ++available;
        if (rep.gap < min_hwi) min_hwi = rep.gap, worst = i;
        for (const auto& [k, v] : rep.extra)
          if (k == "lsi_from_hwi_gap") min_lsi = std::min(min_lsi, v);
      }
      if (available > 0) {
        set_lower_bound(r, min_hwi, 0.0, tol);
        if (std::isfinite(min_lsi) && min_lsi < -tol) r.verdict = Verdict::Fail;
        r.extra.emplace_back("available", static_cast<double>(available));
        r.extra.emplace_back("worst_index", static_cast<double>(worst));
        if (std::isfinite(min_lsi)) r.extra.emplace_back("lsi_from_hwi_min", min_lsi);
      }
    }
    out.reports.push_back(std::move(r));
  }
}

// ---------------------------------------------------------------------------
// flow: scheme certification plus dissipation/decay along a trace.

inline void run_flow(const SolitonModel& m, const RunConfig& cfg, TaskOutput& out) {
  static constexpr const char* kFlowChecks[] = {
      "flow-fixed-point", "flow-closed-form",        "flow-order",
      "flow-dissipation", "flow-fisher-dissipation", "flow-decay"};
  bool capable = true;
  try {
    (void)build_flow_grid(m, 8);
  } catch (const std::invalid_argument&) {
    capable = false;
  }
  if (!capable) {
    for (const char* id : kFlowChecks) {
      FunctionalReport r;
      r.check_id = id;
      r.model = m.id;
      r.density = "--";
      out.reports.push_back(std::move(r));  // NotApplicable: not radially reducible
    }
    return;
  }

  const bool flat = detail::single_flat_factor(m);
  const int res_c = std::max(512, cfg.resolution);
  // the cell-entropy quadrature error carries the s^{dim-1} area weight, so
  // higher-dimensional radial charts need proportionally more cells to meet
  // the closed-form tolerance
  const int res_scheme =
      (flat && std::get<FlatGaussian>(m.factors[0]).dim >= 3) ? 2 * res_c : res_c;
  out.reports.push_back(flow_fixed_point_check(m, res_scheme, 2e-4));
  if (flat) {
    out.reports.push_back(flow_closed_form_check(m, 2.0, 1.0, 2e-4, res_scheme));
    out.reports.push_back(flow_order_check(m, 2.0, 1.0, 2e-4, res_scheme));
  } else {
    for (const char* id : {"flow-closed-form", "flow-order"}) {
      FunctionalReport r;
      r.check_id = id;
      r.model = m.id;
      r.density = "--";  // no Gaussian closed form on curved charts
      out.reports.push_back(std::move(r));
    }
  }

  auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, res_c, 2.0));
  FlowState st;
  if (flat) {
    Density init;
    init.form = ParamGaussianDensity{2.0, {}};
    st = make_flow_state(m, grid, init);
  } else {
    st = make_flow_state_cos_bump(grid, 0.5);
  }
  const FlowTrace tr = run_flow(m, std::move(st), cfg.horizon, cfg.dt);
  {
    std::ostringstream os;
    write_trace_csv(tr, os);
    out.artifacts.emplace_back("flow-" + artifact_stem(m.id) + ".csv", os.str());
  }
  out.reports.push_back(dissipation_check(tr, 1e-2));
  out.reports.push_back(fisher_dissipation_check(m, tr, /*widening=*/true, 1e-2));
  out.reports.push_back(decay_check(tr, cd_lower_bound(m), 1e-3));
}

// ---------------------------------------------------------------------------
// volume: asymptotic ratio, growth bounds, potential envelopes.

inline void run_volume(const SolitonModel& m, const RunConfig& /*cfg*/, TaskOutput& out) {
  out.reports.push_back(avr_check(m));
  out.reports.push_back(growth_bound_check(m));
  out.reports.push_back(potential_growth_check(m));
  const VolumeScan sc = avr_scan(m);
  std::ostringstream os;
  write_scan_csv(sc, os);
  out.artifacts.emplace_back("volume-" + artifact_stem(m.id) + ".csv", os.str());
}

inline void run_suite_part(const std::string& part, const SolitonModel& m,
                           const RunConfig& cfg, TaskOutput& out) {
  if (part == "identities") return run_identities(m, cfg, out);
  if (part == "lsi") return run_lsi(m, cfg, out);
  if (part == "hwi") return run_hwi(m, cfg, out);
  if (part == "flow") return run_flow(m, cfg, out);
  if (part == "volume") return run_volume(m, cfg, out);
  throw std::invalid_argument("unknown suite: " + part);
}

}  // namespace detail

// Expands "all"/empty to the full catalog and validates every id (throws
// std::invalid_argument on unknown ids, which the CLI reports as usage).
inline std::vector<std::string> resolve_models(const std::vector<std::string>& ids) {
  std::vector<std::string> out = ids;
  if (out.empty() || (out.size() == 1 && out[0] == "all")) out = catalog_ids();
  for (const auto& id : out) (void)make_model(id);
  return out;
}

inline SuiteReport run_verify(const RunConfig& config) {
  RunConfig cfg = config;
  if (cfg.resolution < 16)
    throw std::invalid_argument("resolution must be at least 16");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(cfg.tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
  if (cfg.cutoff < 0.0) throw std::invalid_argument("cutoff must be nonnegative");
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end()) {
    std::string msg = "unknown suite '" + cfg.suite + "' (expected";
    for (const auto& n : names) msg += " " + n;
    throw std::invalid_argument(msg + ")");
  }

  cfg.models = resolve_models(cfg.models);
  std::vector<SolitonModel> models;
  models.reserve(cfg.models.size());
  for (const auto& id : cfg.models) models.push_back(make_model(id));

  const std::vector<std::string> parts =
      cfg.suite == "all"
          ? std::vector<std::string>{"identities", "lsi", "hwi", "flow", "volume"}
          : std::vector<std::string>{cfg.suite};

  struct Task {
    const SolitonModel* model;
    const std::string* part;
  };
  std::vector<Task> tasks;
  tasks.reserve(models.size() * parts.size());
  for (const auto& m : models)
    for (const auto& p : parts) tasks.push_back({&m, &p});

  std::vector<detail::TaskOutput> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      try {
        detail::run_suite_part(*tasks[k].part, *tasks[k].model, cfg, results[k]);
      } catch (const std::exception& e) {
        FunctionalReport r;
        r.check_id = "suite-error";
        r.model = tasks[k].model->id;
        r.density = e.what();
        r.verdict = Verdict::Fail;
        results[k].reports.push_back(std::move(r));
      }
    }
  };
  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                               : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, tasks.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SuiteReport sr;
  sr.config = cfg;
  const bool write = !cfg.out_dir.empty();
  if (write) std::filesystem::create_directories(cfg.out_dir);
  for (auto& res : results) {
    for (auto& r : res.reports) sr.add(std::move(r));
    if (write) {
      for (const auto& [name, bytes] : res.artifacts) {
        std::ofstream f(std::filesystem::path(cfg.out_dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write artifact: " + name);
        f << bytes;
      }
    }
  }
  return sr;
}

}  // namespace soliton_entropy
