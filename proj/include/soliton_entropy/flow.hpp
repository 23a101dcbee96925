#pragma once

// Conservative finite-volume solver for the density flow
//   d(rho)/dt = div( rho grad(log rho + V) )
// on radially reducible models (lone flat factor, or lone S^2 via colatitude
// arclength). The solve runs in h = rho e^V, where the flow is the weighted
// heat equation  m(s) dh/dt = d/ds( k(s) dh/ds )  with m = k = A e^{-V} and
// A the area element of the radial chart. Cell masses and face conductances
// make the spatial operator self-adjoint in the weighted inner product and
// exactly conservative under the zero-flux boundary; backward-Euler steps
// keep h nonnegative (M-matrix) and the relative entropy non-increasing.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "catalog.hpp"
#include "density.hpp"
#include "functionals.hpp"
#include "grid.hpp"
#include "report.hpp"

namespace soliton_entropy {

namespace detail {

struct RadialChart {
  double length = 0.0;  // chart interval [0, length], arclength parameter
  bool sphere = false;
  double radius = 0.0;  // sphere radius when sphere
  int flat_dim = 0;     // flat factor dimension otherwise
};

inline RadialChart flow_chart(const SolitonModel& m, double tail_scale) {
  if (m.factors.size() != 1)
    throw std::invalid_argument("flow: model is not radially reducible (needs a lone factor)");
  RadialChart c;
  if (const auto* g = std::get_if<FlatGaussian>(&m.factors[0])) {
    for (double b : g->tilt)
      if (b != 0.0)
        throw std::invalid_argument("flow: tilted flat factors break radial symmetry");
    c.flat_dim = g->dim;
    c.length = auto_cutoff(m, *g, tail_scale);
    return c;
  }
  if (const auto* g = std::get_if<RoundSphere>(&m.factors[0])) {
    if (g->dim != 2) throw std::invalid_argument("flow: only S^2 sphere factors are supported");
    c.sphere = true;
    c.radius = g->radius;
    c.length = std::numbers::pi * g->radius;
    return c;
  }
  throw std::invalid_argument("flow: factor type is not radially reducible");
}

inline ChartPoint flow_point(const RadialChart& c, double s) {
  ChartPoint p;
  if (c.sphere) {
    p.coords.push_back({s / c.radius, 0.0});
  } else {
    std::vector<double> x(static_cast<std::size_t>(c.flat_dim), 0.0);
    x[0] = s;
    p.coords.push_back(std::move(x));
  }
  return p;
}

// Area element of the chart: measure on the model is A(s) ds. A lone R line
// is folded onto [0, R] by even symmetry, hence the factor 2.
inline double flow_area(const RadialChart& c, double s) {
  if (c.sphere) return 2.0 * std::numbers::pi * c.radius * std::sin(s / c.radius);
  if (c.flat_dim == 1) return 2.0;
  return sphere_surface_area(c.flat_dim - 1, 1.0) * std::pow(s, c.flat_dim - 1);
}

}  // namespace detail

struct FlowGrid {
  std::string model_id;
  int resolution = 0;
  double length = 0.0;  // chart interval [0, length]
  double dx = 0.0;
  detail::RadialChart chart;
  std::vector<double> centers;    // cell centers, size resolution
  std::vector<double> potential;  // V at centers (normalized: e^{-V} has unit mass)
  std::vector<double> ref_mass;   // per-cell reference mass: int_cell A e^{-V} ds
  std::vector<double> conduct;    // interior faces (A e^{-V})(s_f) / dx, size resolution-1
  double dt_bound = 0.0;          // drift-resolution bound: dx / max(1, max |V'|)
};

// Builds the radial cell grid. tail_scale widens the flat cutoff so that the
// widest initial Gaussian (variance scale s0) also has tail mass < 1e-12.
inline FlowGrid build_flow_grid(const SolitonModel& m, int resolution, double tail_scale = 1.0) {
  if (resolution < 8) throw std::invalid_argument("build_flow_grid: resolution too small");
  FlowGrid g;
  g.model_id = m.id;
  g.resolution = resolution;
  g.chart = detail::flow_chart(m, tail_scale);
  g.length = g.chart.length;
  g.dx = g.length / resolution;
  const double pref = detail::log_measure_prefactor(m, m.tau);
  auto v_at = [&](double s) { return potential(m, detail::flow_point(g.chart, s)) + pref; };
  g.centers.resize(resolution);
  g.potential.resize(resolution);
  g.ref_mass.resize(resolution);
  // two-point Gauss rule per cell for the reference cell masses
  const double gl = 0.5 / std::numbers::sqrt3;
  for (int i = 0; i < resolution; ++i) {
    const double c = (i + 0.5) * g.dx;
    g.centers[i] = c;
    g.potential[i] = v_at(c);
    double mass = 0.0;
    for (double off : {-gl, gl}) {
      const double s = c + off * g.dx;
      mass += 0.5 * detail::flow_area(g.chart, s) * std::exp(-v_at(s));
    }
    g.ref_mass[i] = mass * g.dx;
  }
  g.conduct.resize(resolution - 1);
  double max_slope = 1.0;
  for (int f = 0; f + 1 < resolution; ++f) {
    const double s = (f + 1) * g.dx;
    g.conduct[f] = detail::flow_area(g.chart, s) * std::exp(-v_at(s)) / g.dx;
    max_slope = std::max(max_slope, std::abs(g.potential[f + 1] - g.potential[f]) / g.dx);
  }
  g.dt_bound = g.dx / max_slope;
  return g;
}

struct FlowState {
  std::shared_ptr<const FlowGrid> grid;
  std::vector<double> h;  // rho e^V per cell
  double t = 0.0;
};

namespace detail {

// Normalizes h so the discrete mass sum(ref_mass * h) is exactly one.
inline void normalize_flow_mass(const FlowGrid& g, std::vector<double>& h) {
  double mass = 0.0;
  for (int i = 0; i < g.resolution; ++i) mass += g.ref_mass[i] * h[i];
  if (!(mass > 0.0)) throw std::invalid_argument("flow: initial density has nonpositive mass");
  for (double& v : h) v /= mass;
}

}  // namespace detail

// Initial state from a closed-form density (evaluated at cell centers).
inline FlowState make_flow_state(const SolitonModel& m, std::shared_ptr<const FlowGrid> grid,
                                 const Density& d) {
  FlowState st;
  st.grid = std::move(grid);
  const FlowGrid& g = *st.grid;
  st.h.resize(g.resolution);
  for (int i = 0; i < g.resolution; ++i) {
    const double lr = log_density_raw(m, d, detail::flow_point(g.chart, g.centers[i]));
    st.h[i] = std::exp(lr + g.potential[i]);
  }
  detail::normalize_flow_mass(g, st.h);
  return st;
}

// Initial state (1 + amp cos(theta)) * reference on a sphere chart.
inline FlowState make_flow_state_cos_bump(std::shared_ptr<const FlowGrid> grid, double amp) {
  FlowState st;
  st.grid = std::move(grid);
  const FlowGrid& g = *st.grid;
  if (!g.chart.sphere)
    throw std::invalid_argument("make_flow_state_cos_bump: grid is not a sphere chart");
  if (!(std::abs(amp) < 1.0))
    throw std::invalid_argument("make_flow_state_cos_bump: |amp| must be < 1");
  st.h.resize(g.resolution);
  for (int i = 0; i < g.resolution; ++i)
    st.h[i] = 1.0 + amp * std::cos(g.centers[i] / g.chart.radius);
  detail::normalize_flow_mass(g, st.h);
  return st;
}

// One backward-Euler step of the weighted heat flow on h. Mass is conserved
// by the flux form; the post-solve rescale only removes solver roundoff.
inline void step_flow(FlowState& st, double dt) {
  const FlowGrid& g = *st.grid;
  if (!(dt > 0.0)) throw std::invalid_argument("step_flow: dt must be positive");
  if (dt > g.dt_bound * (1.0 + 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "step_flow: dt=%.3g exceeds the drift-resolution bound %.3g; use dt <= %.3g",
                  dt, g.dt_bound, g.dt_bound);
    throw std::invalid_argument(buf);
  }
  const int n = g.resolution;
  std::vector<double> diag(n), upper(n - 1), rhs(n);
  for (int i = 0; i < n; ++i) {
    const double kl = i > 0 ? g.conduct[i - 1] : 0.0;
    const double kr = i + 1 < n ? g.conduct[i] : 0.0;
    diag[i] = g.ref_mass[i] + dt * (kl + kr);
    if (i + 1 < n) upper[i] = -dt * g.conduct[i];
    rhs[i] = g.ref_mass[i] * st.h[i];
  }
  // Thomas solve; the matrix is symmetric tridiagonal with lower = upper
  std::vector<double> cp(n - 1), dp(n);
  cp[0] = upper[0] / diag[0];
  dp[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double denom = diag[i] - upper[i - 1] * cp[i - 1];
    if (i + 1 < n) cp[i] = upper[i] / denom;
    dp[i] = (rhs[i] - upper[i - 1] * dp[i - 1]) / denom;
  }
  st.h[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) st.h[i] = dp[i] - cp[i] * st.h[i + 1];

  double mass = 0.0, min_rho = 0.0;
  for (int i = 0; i < n; ++i) {
    mass += g.ref_mass[i] * st.h[i];
    min_rho = std::min(min_rho, st.h[i] * std::exp(-g.potential[i]));
  }
  if (min_rho < -1e-14)
    throw std::runtime_error("step_flow: step produced a negative density cell");
  if (!(std::abs(mass - 1.0) < 1e-10))
    throw std::runtime_error("step_flow: conservative mass identity violated");
  for (double& v : st.h) v /= mass;
  st.t += dt;
}

struct FlowSample {
  double t = 0.0;
  double entropy = 0.0;      // H_V
  double fisher = 0.0;       // I_V (discrete Dirichlet form of the scheme)
  double mass = 0.0;
  double min_density = 0.0;  // min_i rho_i
};

struct FlowTrace {
  std::string model_id;
  int resolution = 0;
  double dx = 0.0;
  double dt = 0.0;
  double cutoff = 0.0;
  double decay_rate = 0.0;  // K for the e^{-2Kt} envelopes
  std::vector<FlowSample> samples;
};

// H, I, mass and min density of the current state. H = sum m_i h_i log h_i,
// I = sum_f k_f (h_+ - h_-)(log h_+ - log h_-); -I is exactly the
// semi-discrete dH/dt of the scheme.
inline FlowSample sample_flow(const FlowState& st) {
  const FlowGrid& g = *st.grid;
  FlowSample s;
  s.t = st.t;
  double mass = 0.0, entropy = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.resolution; ++i) {
    const double h = st.h[i];
    mass += g.ref_mass[i] * h;
    if (h > 0.0) entropy += g.ref_mass[i] * h * std::log(h);
    min_rho = std::min(min_rho, h * std::exp(-g.potential[i]));
  }
  double fisher = 0.0;
  for (int f = 0; f + 1 < g.resolution; ++f) {
    const double ha = st.h[f], hb = st.h[f + 1];
    if (ha > 0.0 && hb > 0.0) fisher += g.conduct[f] * (hb - ha) * (std::log(hb) - std::log(ha));
  }
  s.mass = mass;
  s.entropy = entropy;
  s.fisher = fisher;
  s.min_density = min_rho;
  return s;
}

// Evolves the state over [t, t + horizon] and samples the functionals at a
// uniform stride (about 200 samples plus the endpoints).
inline FlowTrace run_flow(const SolitonModel& m, FlowState st, double horizon, double dt,
                          int target_samples = 200) {
  if (!(horizon > 0.0)) throw std::invalid_argument("run_flow: horizon must be positive");
  const FlowGrid& g = *st.grid;
  const long steps = std::max(1L, std::lround(std::ceil(horizon / dt - 1e-12)));
  const double dt_eff = horizon / static_cast<double>(steps);
  const long stride = std::max(1L, steps / std::max(1, target_samples));
  FlowTrace tr;
  tr.model_id = m.id;
  tr.resolution = g.resolution;
  tr.dx = g.dx;
  tr.dt = dt_eff;
  tr.cutoff = g.length;
  tr.decay_rate = cd_lower_bound(m);
  tr.samples.push_back(sample_flow(st));
  for (long k = 1; k <= steps; ++k) {
    step_flow(st, dt_eff);
    if (k % stride == 0 || k == steps) tr.samples.push_back(sample_flow(st));
  }
  return tr;
}

inline void write_trace_csv(const FlowTrace& tr, std::ostream& os) {
  os << "t,H,I,mass,min_density\n";
  char line[200];
  for (const auto& s : tr.samples) {
    std::snprintf(line, sizeof line, "%.12g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.entropy, s.fisher,
                  s.mass, s.min_density);
    os << line;
  }
}

namespace detail {

// Centered slope of y(t) at sample k; tolerates a shorter final interval.
inline double trace_slope(const FlowTrace& tr, const std::vector<double>& y, std::size_t k) {
  return (y[k + 1] - y[k - 1]) / (tr.samples[k + 1].t - tr.samples[k - 1].t);
}

inline GridCertificate flow_certificate(const FlowTrace& tr) {
  GridCertificate c;
  c.resolution = tr.resolution;
  c.cutoff = tr.cutoff;
  c.refinement_delta = 0.0;
  return c;
}

}  // namespace detail

// Checks the entropy dissipation identity dH/dt = -I at interior samples and
// that H never increases along the trace.
inline FunctionalReport dissipation_check(const FlowTrace& tr, double tol = 1e-2) {
  if (tr.samples.size() < 10)
    throw std::invalid_argument("dissipation_check: trace needs at least 10 samples");
  FunctionalReport r;
  r.check_id = "flow-dissipation";
  r.model = tr.model_id;
  r.density = "flow-trace";
  r.tolerance = tol;
  r.grid = detail::flow_certificate(tr);
  const std::size_t n = tr.samples.size();
  std::vector<double> hs(n), is(n);
  for (std::size_t k = 0; k < n; ++k) {
    hs[k] = tr.samples[k].entropy;
    is[k] = tr.samples[k].fisher;
  }
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double slope = detail::trace_slope(tr, hs, k);
    const double rel = std::abs(slope + is[k]) / std::max(std::abs(is[k]), 1e-12);
    worst = std::max(worst, rel);
  }
  bool monotone = true;
  const double slack = 1e-14 * std::max(1.0, std::abs(hs[0]));
  for (std::size_t k = 1; k < n; ++k) monotone = monotone && hs[k] <= hs[k - 1] + slack;
  r.value = worst;
  r.bound = tol;
  r.gap = tol - worst;
  r.extra.emplace_back("h_monotone", monotone ? 1.0 : 0.0);
  r.extra.emplace_back("dt", tr.dt);
  r.verdict = (worst <= tol && monotone) ? Verdict::Pass : Verdict::Fail;
  return r;
}

// Checks the Fisher dissipation rate against its closed form on a flat
// Gaussian trace: with xi_ij = c g_ij, c = (s-1)/(2 s tau),
//   dI/dt = -2 (n c^2 + I/(2 tau)).
// The family parameter s is recovered from I itself; `widening` selects the
// branch (true when the initial variance exceeds the reference variance).
// Also requires I non-increasing, which holds whenever cd_lower_bound >= 0.
inline FunctionalReport fisher_dissipation_check(const SolitonModel& m, const FlowTrace& tr,
                                                 bool widening, double tol = 1e-2) {
  if (tr.samples.size() < 10)
    throw std::invalid_argument("fisher_dissipation_check: trace needs at least 10 samples");
  FunctionalReport r;
  r.check_id = "flow-fisher-dissipation";
  r.model = tr.model_id;
  r.density = "flow-trace";
  r.tolerance = tol;
  r.grid = detail::flow_certificate(tr);
  const bool gaussian_flat =
      m.factors.size() == 1 && std::holds_alternative<FlatGaussian>(m.factors[0]);
  const std::size_t n = tr.samples.size();
  std::vector<double> is(n);
  for (std::size_t k = 0; k < n; ++k) is[k] = tr.samples[k].fisher;
  bool monotone = true;
  const double slack = 1e-12 * std::max(1.0, is[0]);
  for (std::size_t k = 1; k < n; ++k) monotone = monotone && is[k] <= is[k - 1] + slack;
  r.extra.emplace_back("i_monotone", monotone ? 1.0 : 0.0);
  if (!gaussian_flat) {
    r.value = monotone ? 0.0 : 1.0;
    r.bound = tol;
    r.gap = 0.0;
    r.verdict = monotone ? Verdict::NotApplicable : Verdict::Fail;
    return r;
  }
  const double nd = m.total_dim, tau = m.tau;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double slope = detail::trace_slope(tr, is, k);
    const double x = 1.0 + tau * is[k] / nd;
    const double root = std::sqrt(std::max(0.0, x * x - 1.0));
    const double s = widening ? x + root : x - root;
    const double c = (s - 1.0) / (2.0 * s * tau);
    const double rhs = -2.0 * (nd * c * c + is[k] / (2.0 * tau));
    const double rel = std::abs(slope - rhs) / std::max(std::abs(rhs), 1e-12);
    worst = std::max(worst, rel);
  }
  r.value = worst;
  r.bound = tol;
  r.gap = tol - worst;
  r.verdict = (worst <= tol && monotone) ? Verdict::Pass : Verdict::Fail;
  return r;
}

// Checks H(t) <= H(0) e^{-2Kt} (1+tol) and the same for I at every sample.
inline FunctionalReport decay_check(const FlowTrace& tr, double K, double tol = 1e-3) {
  FunctionalReport r;
  r.check_id = "flow-decay";
  r.model = tr.model_id;
  r.density = "flow-trace";
  r.tolerance = tol;
  r.grid = detail::flow_certificate(tr);
  r.extra.emplace_back("decay_rate", K);
  if (!(K > 0.0)) {
    r.verdict = Verdict::NotApplicable;
    return r;
  }
  const double h0 = tr.samples.front().entropy;
  const double i0 = tr.samples.front().fisher;
  double worst = 0.0;  // max over samples of value / envelope
  for (const auto& s : tr.samples) {
    const double env = std::exp(-2.0 * K * s.t);
    // a trace started at the reference sits at the quadrature floor; the
    // envelope ratio is meaningless there
    if (h0 > 1e-12) worst = std::max(worst, s.entropy / (h0 * env));
    else if (s.entropy > 1e-12) worst = std::numeric_limits<double>::infinity();
    if (i0 > 1e-12) worst = std::max(worst, s.fisher / (i0 * env));
    else if (s.fisher > 1e-12) worst = std::numeric_limits<double>::infinity();
  }
  r.value = worst;
  r.bound = 1.0 + tol;
  r.gap = r.bound - worst;
  r.verdict = worst <= r.bound ? Verdict::Pass : Verdict::Fail;
  return r;
}

// One step from the reference must return the reference: h stays constant up
// to solver roundoff.
inline FunctionalReport flow_fixed_point_check(const SolitonModel& m, int resolution,
                                               double dt = 2e-4) {
  auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, resolution));
  FlowState st = make_flow_state(m, grid, reference_density(m));
  std::vector<double> before = st.h;
  step_flow(st, dt);
  double worst = 0.0;
  for (int i = 0; i < grid->resolution; ++i)
    worst = std::max(worst,
                     std::abs(st.h[i] - before[i]) * std::exp(-grid->potential[i]));
  FunctionalReport r;
  r.check_id = "flow-fixed-point";
  r.model = m.id;
  r.density = "reference";
  r.tolerance = 1e-13;
  r.value = worst;
  r.bound = 1e-13;
  r.gap = r.bound - worst;
  r.grid.resolution = resolution;
  r.grid.cutoff = grid->length;
  r.verdict = worst <= r.bound ? Verdict::Pass : Verdict::Fail;
  return r;
}

namespace detail {

// L1 distance between the evolved density and the exact Gaussian solution
// N(0, 2 s(t) tau) with s(t) = 1 + (s0 - 1) e^{-t/tau}.
inline double gaussian_flow_l1_error(const SolitonModel& m, const FlowState& st, double s0) {
  const FlowGrid& g = *st.grid;
  const double s = 1.0 + (s0 - 1.0) * std::exp(-st.t / m.tau);
  const double nd = m.total_dim;
  const double lognorm = 0.5 * nd * std::log(4.0 * std::numbers::pi * s * m.tau);
  double err = 0.0;
  for (int i = 0; i < g.resolution; ++i) {
    const double c = g.centers[i];
    const double exact = std::exp(-c * c / (4.0 * s * m.tau) - lognorm);
    const double rho = st.h[i] * std::exp(-g.potential[i]);
    err += std::abs(rho - exact) * flow_area(g.chart, c) * g.dx;
  }
  return err;
}

}  // namespace detail

// Evolves a centered Gaussian of variance scale s0 and compares against the
// closed-form solution: final L1 density error, max H deviation from
// (n/2)(s - 1 - log s), and the mass drift across the whole trace.
inline FunctionalReport flow_closed_form_check(const SolitonModel& m, double s0, double horizon,
                                               double dt, int resolution) {
  auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, resolution, std::max(1.0, s0)));
  Density init;
  init.form = ParamGaussianDensity{s0, {}};
  FlowState st = make_flow_state(m, grid, init);

  const long steps = std::max(1L, std::lround(std::ceil(horizon / dt - 1e-12)));
  const double dt_eff = horizon / static_cast<double>(steps);
  const long stride = std::max(1L, steps / 200);
  const double nd = m.total_dim;
  double h_err = 0.0, mass_drift = 0.0;
  auto check_sample = [&](const FlowState& cur) {
    const FlowSample smp = sample_flow(cur);
    const double s = 1.0 + (s0 - 1.0) * std::exp(-cur.t / m.tau);
    const double h_exact = 0.5 * nd * (s - 1.0 - std::log(s));
    h_err = std::max(h_err, std::abs(smp.entropy - h_exact));
    mass_drift = std::max(mass_drift, std::abs(smp.mass - 1.0));
  };
  check_sample(st);
  for (long k = 1; k <= steps; ++k) {
    step_flow(st, dt_eff);
    if (k % stride == 0 || k == steps) check_sample(st);
  }
  const double l1 = detail::gaussian_flow_l1_error(m, st, s0);

  FunctionalReport r;
  r.check_id = "flow-closed-form";
  r.model = m.id;
  r.density = describe(init);
  r.tolerance = 1e-4;
  r.value = l1;
  r.bound = 1e-4;
  r.gap = r.bound - l1;
  r.grid.resolution = resolution;
  r.grid.cutoff = grid->length;
  r.extra.emplace_back("h_max_err", h_err);
  r.extra.emplace_back("mass_drift", mass_drift);
  r.extra.emplace_back("dt", dt_eff);
  r.extra.emplace_back("horizon", horizon);
  r.verdict = (l1 <= 1e-4 && h_err <= 1e-4 && mass_drift <= 1e-13) ? Verdict::Pass : Verdict::Fail;
  return r;
}

// First-order-in-time, second-order-in-space convergence: refining the grid
// 4x (with dt scaled down 4x) must shrink the closed-form L1 error by >= 3.5.
inline FunctionalReport flow_order_check(const SolitonModel& m, double s0, double horizon,
                                         double dt, int resolution) {
  auto l1_at = [&](int res, double step) {
    auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, res, std::max(1.0, s0)));
    Density init;
    init.form = ParamGaussianDensity{s0, {}};
    FlowState st = make_flow_state(m, grid, init);
    const long steps = std::max(1L, std::lround(std::ceil(horizon / step - 1e-12)));
    const double dt_eff = horizon / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) step_flow(st, dt_eff);
    return detail::gaussian_flow_l1_error(m, st, s0);
  };
  const double coarse = l1_at(resolution / 4, dt * 4.0);
  const double fine = l1_at(resolution, dt);
  FunctionalReport r;
  r.check_id = "flow-order";
  r.model = m.id;
  r.density = "param-gaussian";
  r.tolerance = 0.0;
  r.value = coarse / fine;
  r.bound = 3.5;
  r.gap = r.value - r.bound;
  r.grid.resolution = resolution;
  r.grid.refinement_delta = fine;
  r.extra.emplace_back("l1_coarse", coarse);
  r.extra.emplace_back("l1_fine", fine);
  r.verdict = r.value >= r.bound ? Verdict::Pass : Verdict::Fail;
  return r;
}

}  // namespace soliton_entropy
