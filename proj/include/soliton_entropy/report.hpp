#pragma once

// Check reports and their JSON serialization.
//
// Every check emits one FunctionalReport. A suite run wraps the reports in a
// SuiteReport with a config echo and summary counts. JSON bytes are
// deterministic for a fixed config and seed; the timestamp lives in the
// single top-level key "generated_at" so consumers can compare runs by
// dropping that one line.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace soliton_entropy {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kArtifactVersion = "0.1.0";

enum class Verdict { Pass, Fail, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "not-applicable";
  }
}

struct GridCertificate {
  int resolution = 0;
  double cutoff = 0.0;
  double refinement_delta = 0.0;  // |value(res) - value(2 res)| when measured
};

struct FunctionalReport {
  std::string check_id;
  std::string model;
  std::string density;
  double sigma = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();
  double h_value = std::numeric_limits<double>::quiet_NaN();
  double i_value = std::numeric_limits<double>::quiet_NaN();
  double w_value = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::NotApplicable;
  double tolerance = 0.0;
  GridCertificate grid;
  // check-specific scalars (flow parameters, fitted exponents, ...)
  std::vector<std::pair<std::string, double>> extra;

  bool passed() const { return verdict == Verdict::Pass; }
};

// pass <=> gap >= -tolerance for bound-style checks
inline Verdict verdict_from_gap(double gap, double tolerance) {
  return gap >= -tolerance ? Verdict::Pass : Verdict::Fail;
}

// pass <=> |value - target| <= tolerance for equality-style checks
inline Verdict verdict_from_error(double err, double tolerance) {
  return std::abs(err) <= tolerance ? Verdict::Pass : Verdict::Fail;
}

struct RunConfig {
  std::vector<std::string> models;  // empty = whole catalog
  std::string suite = "all";
  int resolution = 256;
  double cutoff = 0.0;  // 0 = auto
  double dt = 2e-4;
  double horizon = 1.0;
  double tol = 1e-8;
  std::uint64_t seed = 7;
  std::string out_dir = "reports";
  int jobs = 0;  // 0 = hardware concurrency
};

struct SuiteReport {
  RunConfig config;
  std::vector<FunctionalReport> checks;
  int n_pass = 0, n_fail = 0, n_na = 0;

  void add(FunctionalReport r) {
    switch (r.verdict) {
      case Verdict::Pass: ++n_pass; break;
      case Verdict::Fail: ++n_fail; break;
      case Verdict::NotApplicable: ++n_na; break;
    }
    checks.push_back(std::move(r));
  }
  bool all_passed() const { return n_fail == 0; }
};

namespace detail {

// JSON-safe number: NaN (unset field) maps to null.
inline nlohmann::ordered_json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const FunctionalReport& r) {
  nlohmann::ordered_json j;
  j["check_id"] = r.check_id;
  j["model"] = r.model;
  j["density"] = r.density;
  j["sigma"] = r.sigma;
  j["value"] = detail::num_or_null(r.value);
  j["h_value"] = detail::num_or_null(r.h_value);
  j["i_value"] = detail::num_or_null(r.i_value);
  j["w_value"] = detail::num_or_null(r.w_value);
  j["bound"] = detail::num_or_null(r.bound);
  j["gap"] = detail::num_or_null(r.gap);
  if (r.verdict == Verdict::NotApplicable)
    j["pass"] = nullptr;
  else
    j["pass"] = (r.verdict == Verdict::Pass);
  j["tolerance"] = r.tolerance;
  j["grid"] = {{"resolution", r.grid.resolution},
               {"cutoff", r.grid.cutoff},
               {"refinement_delta", r.grid.refinement_delta}};
  if (!r.extra.empty()) {
    nlohmann::ordered_json e;
    for (const auto& [k, v] : r.extra) e[k] = detail::num_or_null(v);
    j["extra"] = std::move(e);
  }
  return j;
}

inline FunctionalReport report_from_json(const nlohmann::json& j) {
  FunctionalReport r;
  auto num = [&](const char* key) -> double {
    if (!j.contains(key) || j.at(key).is_null())
      return std::numeric_limits<double>::quiet_NaN();
    return j.at(key).get<double>();
  };
  r.check_id = j.value("check_id", "");
  r.model = j.value("model", "");
  r.density = j.value("density", "");
  r.sigma = num("sigma");
  r.value = num("value");
  r.h_value = num("h_value");
  r.i_value = num("i_value");
  r.w_value = num("w_value");
  r.bound = num("bound");
  r.gap = num("gap");
  if (!j.contains("pass") || j.at("pass").is_null())
    r.verdict = Verdict::NotApplicable;
  else
    r.verdict = j.at("pass").get<bool>() ? Verdict::Pass : Verdict::Fail;
  r.tolerance = num("tolerance");
  if (j.contains("grid")) {
    r.grid.resolution = j.at("grid").value("resolution", 0);
    r.grid.cutoff = j.at("grid").value("cutoff", 0.0);
    r.grid.refinement_delta = j.at("grid").value("refinement_delta", 0.0);
  }
  return r;
}

inline std::string iso8601_utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json to_json(const SuiteReport& s,
                                      const std::string& timestamp = iso8601_utc_now()) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["generated_at"] = timestamp;
  nlohmann::ordered_json cfg;
  cfg["models"] = s.config.models;
  cfg["suite"] = s.config.suite;
  cfg["resolution"] = s.config.resolution;
  cfg["cutoff"] = s.config.cutoff;
  cfg["dt"] = s.config.dt;
  cfg["horizon"] = s.config.horizon;
  cfg["tol"] = s.config.tol;
  cfg["seed"] = s.config.seed;
  cfg["jobs"] = s.config.jobs;
  j["config"] = std::move(cfg);
  auto checks = nlohmann::ordered_json::array();
  for (const auto& r : s.checks) checks.push_back(to_json(r));
  j["checks"] = std::move(checks);
  j["summary"] = {{"pass", s.n_pass}, {"fail", s.n_fail}, {"not_applicable", s.n_na}};
  return j;
}

// Serialized suite report; two runs with equal configs produce equal bytes
// except for the generated_at line.
inline std::string render_suite_json(const SuiteReport& s,
                                     const std::string& timestamp = iso8601_utc_now()) {
  return to_json(s, timestamp).dump(2) + "\n";
}

inline void write_suite_report(const SuiteReport& s, const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path.string());
  out << render_suite_json(s);
}

// ---------------------------------------------------------------------------
// Stored-report summarization (the `report` subcommand).

struct StoredSuite {
  std::filesystem::path path;
  std::vector<FunctionalReport> checks;
  std::string error;  // nonempty when the file failed to parse
};

inline std::vector<StoredSuite> load_reports(const std::filesystem::path& dir) {
  std::vector<StoredSuite> out;
  if (!std::filesystem::is_directory(dir)) return out;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    StoredSuite s;
    s.path = f;
    try {
      std::ifstream in(f);
      nlohmann::json j = nlohmann::json::parse(in);
      for (const auto& c : j.at("checks")) s.checks.push_back(report_from_json(c));
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Renders the fixed-width summary table: per-file counts, then failures
// ordered by |gap| descending. Returns exit code (0 ok, 1 problems).
inline int render_report_table(const std::vector<StoredSuite>& suites, std::ostream& os) {
  if (suites.empty()) {
    os << "no reports found\n";
    return 1;
  }
  int exit_code = 0;
  std::vector<const FunctionalReport*> failures;
  os << "file                                     pass  fail  n/a\n";
  for (const auto& s : suites) {
    if (!s.error.empty()) {
      os << s.path.filename().string() << "  ERROR: " << s.error << "\n";
      exit_code = 1;
      continue;
    }
    int np = 0, nf = 0, na = 0;
    for (const auto& c : s.checks) {
      switch (c.verdict) {
        case Verdict::Pass: ++np; break;
        case Verdict::Fail: ++nf; ++exit_code; break;
        case Verdict::NotApplicable: ++na; break;
      }
      if (c.verdict == Verdict::Fail) failures.push_back(&c);
    }
    char line[160];
    std::snprintf(line, sizeof line, "%-40s %4d  %4d  %4d\n",
                  s.path.filename().string().c_str(), np, nf, na);
    os << line;
  }
  if (!failures.empty()) {
    std::stable_sort(failures.begin(), failures.end(),
                     [](const FunctionalReport* a, const FunctionalReport* b) {
                       const double ga = std::isnan(a->gap) ? 0.0 : std::abs(a->gap);
                       const double gb = std::isnan(b->gap) ? 0.0 : std::abs(b->gap);
                       return ga > gb;
                     });
    os << "\nfailures (largest gap first):\n";
    for (const auto* c : failures) {
      char line[240];
      std::snprintf(line, sizeof line, "  %-28s %-28s gap=%.6g tol=%.2g\n",
                    c->check_id.c_str(), c->model.c_str(), c->gap, c->tolerance);
      os << line;
    }
  }
  return exit_code ? 1 : 0;
}

}  // namespace soliton_entropy
