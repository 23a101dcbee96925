#pragma once

// Entropy functionals over catalog models: relative entropy H, relative
// Fisher information I, the W-entropy, sharp log-Sobolev gaps at the model's
// own scale and at shifted scales, the Euler-Lagrange residual of the
// W-minimizer equation, and family-search estimates of the sharp constant.
//
// Conventions. V = f + (n/2) log(4 pi tau) for shrinking/expanding kinds and
// V = f for steady kind, so the reference density e^{-V} has unit mass.
// xi = log rho + V. psi is defined by rho = e^{-psi} / (4 pi sigma)^{n/2}
// (steady kind: psi = -log rho). The W-entropy integrand by kind:
//   shrinking:  sigma (|grad psi|^2 + S) + psi - n
//   expanding:  |grad psi|^2 - 3 S + psi - n
//   steady:     |grad psi|^2 - 3 S
// 0 log 0 is 0 throughout.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "soliton_entropy/catalog.hpp"
#include "soliton_entropy/density.hpp"
#include "soliton_entropy/grid.hpp"
#include "soliton_entropy/report.hpp"

namespace soliton_entropy {

// Per-node closed-form model data, computed once per (model, grid).
struct ModelFields {
  std::vector<double> potential;      // f
  std::vector<double> scalar;         // S
  std::vector<double> grad_f_normsq;  // |grad f|^2
};

inline ModelFields model_fields(const SolitonModel& m, const QuadratureGrid& g) {
  ModelFields mf;
  const std::size_t n = g.nodes.size();
  mf.potential.resize(n);
  mf.scalar.resize(n);
  mf.grad_f_normsq.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mf.potential[i] = potential(m, g.nodes[i]);
    mf.scalar[i] = scalar_curvature(m, g.nodes[i]);
    mf.grad_f_normsq[i] = grad_potential_normsq(m, g.nodes[i]);
  }
  return mf;
}

inline GridCertificate grid_certificate(const QuadratureGrid& g) {
  GridCertificate c;
  c.resolution = g.res.radial;
  c.cutoff = g.cutoff;
  return c;
}

namespace detail {

inline double log_measure_prefactor(const SolitonModel& m, double sigma) {
  if (m.kind == SolitonKind::Steady) return 0.0;
  return 0.5 * m.total_dim * std::log(4.0 * std::numbers::pi * sigma);
}

}  // namespace detail

// H = int rho (log rho + V) dGamma; zero exactly at the reference density.
inline double relative_entropy(const SolitonModel& m, const QuadratureGrid& g,
                               const DensityEval& ev, const ModelFields& mf) {
  std::vector<double> integrand(g.nodes.size());
  const double pref = detail::log_measure_prefactor(m, m.tau);
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    integrand[i] = ev.rho[i] > 0.0
                       ? ev.rho[i] * (ev.log_rho[i] + mf.potential[i] + pref)
                       : 0.0;
  }
  return integrate(g, integrand);
}

// I = int |grad(log rho + V)|^2 rho dGamma.
inline double fisher_information(const SolitonModel& m, const QuadratureGrid& g,
                                 const DensityEval& ev, const ModelFields& mf) {
  if (!ev.has_grad)
    throw unsupported_density_error("fisher_information: gradients unavailable");
  std::vector<double> integrand(g.nodes.size());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    const double xi2 =
        ev.grad_normsq[i] + 2.0 * ev.grad_dot_gradf[i] + mf.grad_f_normsq[i];
    integrand[i] = ev.rho[i] * xi2;
  }
  (void)m;
  return integrate(g, integrand);
}

inline double perelman_w(const SolitonModel& m, const QuadratureGrid& g,
                         const DensityEval& ev, const ModelFields& mf, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("perelman_w: sigma must be positive");
  if (!ev.has_grad) throw unsupported_density_error("perelman_w: gradients unavailable");
  const double pref = detail::log_measure_prefactor(m, sigma);
  const double n = m.total_dim;
  std::vector<double> integrand(g.nodes.size());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (!(ev.rho[i] > 0.0)) {
      integrand[i] = 0.0;
      continue;
    }
    const double psi = -ev.log_rho[i] - pref;
    const double gpsi2 = ev.grad_normsq[i];
    double val = 0.0;
    switch (m.kind) {
      case SolitonKind::Shrinking:
        val = sigma * (gpsi2 + mf.scalar[i]) + psi - n;
        break;
      case SolitonKind::Expanding:
        val = gpsi2 - 3.0 * mf.scalar[i] + psi - n;
        break;
      case SolitonKind::Steady:
        val = gpsi2 - 3.0 * mf.scalar[i];
        break;
    }
    integrand[i] = val * ev.rho[i];
  }
  return integrate(g, integrand);
}

// Convenience forms evaluating the density on the grid first.
inline double relative_entropy(const SolitonModel& m, const QuadratureGrid& g,
                               const Density& d) {
  return relative_entropy(m, g, evaluate_density(m, g, d, false), model_fields(m, g));
}
inline double fisher_information(const SolitonModel& m, const QuadratureGrid& g,
                                 const Density& d) {
  return fisher_information(m, g, evaluate_density(m, g, d), model_fields(m, g));
}
inline double perelman_w(const SolitonModel& m, const QuadratureGrid& g,
                         const Density& d, double sigma) {
  return perelman_w(m, g, evaluate_density(m, g, d), model_fields(m, g), sigma);
}

// Fisher information recomputed through the gridded finite-difference path;
// agreement with the closed-form value certifies the rho-form integrand.
inline double fisher_information_fd(const SolitonModel& m, const QuadratureGrid& g,
                                    const Density& d) {
  GriddedDensity gd;
  gd.values.resize(g.nodes.size());
  for (std::size_t i = 0; i < gd.values.size(); ++i)
    gd.values[i] = std::exp(log_density(m, d, g.nodes[i]));
  Density dg;
  dg.form = std::move(gd);
  normalize(m, g, dg);
  return fisher_information(m, g, evaluate_density(m, g, dg), model_fields(m, g));
}

// ---------------------------------------------------------------------------
// Sharp log-Sobolev gap at the model's own scale.

// gap = W(density, sigma) + mu_invariant >= 0 with equality at the reference.
inline FunctionalReport lsi_gap(const SolitonModel& m, const QuadratureGrid& g,
                                const Density& d, double sigma, double tol = 1e-8) {
  const auto mf = model_fields(m, g);
  const auto ev = evaluate_density(m, g, d);
  FunctionalReport r;
  r.check_id = "lsi";
  r.model = m.id;
  r.density = describe(d);
  r.sigma = sigma;
  r.h_value = relative_entropy(m, g, ev, mf);
  r.i_value = fisher_information(m, g, ev, mf);
  r.w_value = perelman_w(m, g, ev, mf, sigma);
  r.value = r.w_value;
  const double mu = mu_invariant(m);
  r.bound = -mu;
  r.gap = r.w_value + mu;
  r.tolerance = tol;
  r.verdict = verdict_from_gap(r.gap, tol);
  r.grid = grid_certificate(g);
  r.extra.emplace_back("equality", std::abs(r.gap) <= tol ? 1.0 : 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Scale-shifted log-Sobolev bounds (shrinking kind only).

struct RicciRange {
  double min = 0.0;
  double max = 0.0;
};

// Closed-form range of Ricci eigenvalues over the product.
inline RicciRange ricci_range(const SolitonModel& m) {
  RicciRange r{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  auto fold = [&](double lo, double hi) {
    r.min = std::min(r.min, lo);
    r.max = std::max(r.max, hi);
  };
  for (const auto& f : m.factors) {
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, FlatGaussian>) {
            fold(0.0, 0.0);
          } else if constexpr (std::is_same_v<T, RoundSphere>) {
            const double k = (g.dim - 1) / (g.radius * g.radius);
            fold(k, k);
          } else if constexpr (std::is_same_v<T, Cigar>) {
            fold(0.0, 2.0);  // Ric = (S/2) g with S in (0, 4]
          } else {
            fold(g.scalar_curv / g.dim, g.scalar_curv / g.dim);
          }
        },
        f);
  }
  if (m.factors.empty()) r = {0.0, 0.0};
  return r;
}

inline double min_scalar_curvature(const SolitonModel& m, const QuadratureGrid& g) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& p : g.nodes) s = std::min(s, scalar_curvature(m, p));
  return s;
}

// The three scale-shift bounds. Hypotheses are gated from closed-form Ricci
// ranges and the grid minimum of S; non-applicable checks carry no verdict.
inline std::vector<FunctionalReport> scale_lsi_bounds(const SolitonModel& m,
                                                      const QuadratureGrid& g,
                                                      const Density& d, double sigma,
                                                      double tol = 1e-8) {
  const auto mf = model_fields(m, g);
  const auto ev = evaluate_density(m, g, d);
  const double w = perelman_w(m, g, ev, mf, sigma);
  const double n = m.total_dim;
  const bool shrink = m.kind == SolitonKind::Shrinking;
  const double mu_s = shrink ? mu_invariant(m) : 0.0;
  const RicciRange ric = ricci_range(m);
  const bool ric_nonneg = ric.min >= -1e-12;

  auto base = [&](const char* id) {
    FunctionalReport r;
    r.check_id = id;
    r.model = m.id;
    r.density = describe(d);
    r.sigma = sigma;
    r.value = w;
    r.w_value = w;
    r.tolerance = tol;
    r.grid = grid_certificate(g);
    return r;
  };

  std::vector<FunctionalReport> out;

  {  // any shrinker, sigma > 1: W >= -mu_s - (n/2) log sigma
    auto r = base("scale-lsi:shift");
    if (shrink && sigma > 1.0) {
      r.bound = -mu_s - 0.5 * n * std::log(sigma);
      r.gap = w - r.bound;
      r.verdict = verdict_from_gap(r.gap, tol);
    }
    out.push_back(std::move(r));
  }
  {  // Ric >= 0 and S bounded below by delta > 0, sigma > 1
    auto r = base("scale-lsi:positive-curvature");
    const double delta = min_scalar_curvature(m, g);
    r.extra.emplace_back("delta", delta);
    if (shrink && sigma > 1.0 && ric_nonneg && delta > 0.0) {
      r.bound = -mu_s + 0.5 * n - delta - 0.5 * n * std::log(0.5 * n / delta);
      r.gap = w - r.bound;
      r.verdict = verdict_from_gap(r.gap, tol);
    }
    out.push_back(std::move(r));
  }
  {  // 0 <= Ric <= A, 0 < sigma <= 1: W >= -mu_s - n A
    auto r = base("scale-lsi:curvature-window");
    const double A = std::max(ric.max, 0.0);
    r.extra.emplace_back("ric_upper", A);
    if (shrink && sigma > 0.0 && sigma <= 1.0 && ric_nonneg &&
        std::isfinite(ric.max)) {
      r.bound = -mu_s - n * A;
      r.gap = w - r.bound;
      r.verdict = verdict_from_gap(r.gap, tol);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Report against the tightest applicable scale bound.
inline FunctionalReport scale_lsi_gap(const SolitonModel& m, const QuadratureGrid& g,
                                      const Density& d, double sigma,
                                      double tol = 1e-8) {
  auto all = scale_lsi_bounds(m, g, d, sigma, tol);
  const FunctionalReport* best = nullptr;
  for (const auto& r : all)
    if (r.verdict != Verdict::NotApplicable && (!best || r.bound > best->bound))
      best = &r;
  if (!best) {
    FunctionalReport r = all.front();
    r.check_id = "scale-lsi";
    r.verdict = Verdict::NotApplicable;
    r.bound = r.gap = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residual of the W-minimizer equation.

// L2 norm over the grid of the stationarity equation for W(., sigma) under
// the unit-mass constraint, in terms of w = sqrt(rho) e^{pref/2}:
//   shrinking:  -4 sigma Lap w + sigma S w - 2 w log w - n w = mu w
//   expanding:  -4 Lap w - 3 S w - 2 w log w - n w = mu w
//   steady:     -4 Lap w - 3 S w = mu w        (eigen-equation, w = e^{-f/2})
// with mu = W(density, sigma); the minimizer at sigma = tau has residual zero.
inline double el_residual(const SolitonModel& m, const QuadratureGrid& g,
                          const Density& d, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("el_residual: sigma must be positive");
  const auto mf = model_fields(m, g);
  const auto ev = evaluate_density(m, g, d, true, true);
  const double mu = perelman_w(m, g, ev, mf, sigma);
  const double n = m.total_dim;
  const double pref = detail::log_measure_prefactor(m, sigma);
  std::vector<double> integrand(g.nodes.size());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (!(ev.rho[i] > 0.0)) {
      integrand[i] = 0.0;
      continue;
    }
    const double logw = 0.5 * (ev.log_rho[i] + pref);
    const double w = std::exp(logw);
    // Lap w = w (Lap log rho / 2 + |grad log rho|^2 / 4)
    const double lapw = w * (0.5 * ev.lap_log[i] + 0.25 * ev.grad_normsq[i]);
    double r = 0.0;
    switch (m.kind) {
      case SolitonKind::Shrinking:
        r = -4.0 * sigma * lapw + sigma * mf.scalar[i] * w - 2.0 * w * logw -
            n * w - mu * w;
        break;
      case SolitonKind::Expanding:
        r = -4.0 * lapw - 3.0 * mf.scalar[i] * w - 2.0 * w * logw - n * w - mu * w;
        break;
      case SolitonKind::Steady:
        r = -4.0 * lapw - 3.0 * mf.scalar[i] * w - mu * w;
        break;
    }
    integrand[i] = r * r;
  }
  return std::sqrt(integrate(g, integrand));
}

// Max over grid nodes of the pointwise minimizer identity
// tau (2 Lap f - |grad f|^2 + S) + f - n + mu_s (analogous per kind).
inline double minimizer_identity_residual(const SolitonModel& m,
                                          const QuadratureGrid& g) {
  const double mu = mu_invariant(m);
  double worst = 0.0;
  for (const auto& p : g.nodes) {
    const double lf = laplacian_potential(m, p);
    const double gf = grad_potential_normsq(m, p);
    const double s = scalar_curvature(m, p);
    const double f = potential(m, p);
    double r = 0.0;
    switch (m.kind) {
      case SolitonKind::Shrinking:
        r = m.tau * (2.0 * lf - gf + s) + f - m.total_dim + mu;
        break;
      case SolitonKind::Expanding:
        // expanding kind has two generating identities instead of one
        r = std::max(std::abs(lf - s - 0.5 * m.total_dim),
                     std::abs(s + gf - f - mu));
        break;
      case SolitonKind::Steady:
        r = std::max(std::abs(lf - s), std::abs(s + gf - mu));
        break;
    }
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

// int f e^{-V} dGamma; at tau the value is at most n/2 for every shrinker.
inline double reference_f_moment(const SolitonModel& m, const QuadratureGrid& g) {
  const auto mf = model_fields(m, g);
  const auto ev = evaluate_density(m, g, reference_density(m), false);
  std::vector<double> integrand(g.nodes.size());
  for (std::size_t i = 0; i < integrand.size(); ++i)
    integrand[i] = mf.potential[i] * ev.rho[i];
  return integrate(g, integrand);
}

// ---------------------------------------------------------------------------
// Family-search estimate of mu(g, sigma).

struct MuEstimate {
  double value = std::numeric_limits<double>::infinity();
  double best_param = 0.0;    // covariance scale s, or tilt eps
  std::string family;         // "param-gaussian" | "tilted-reference"
  int evaluations = 0;
  bool incomplete = false;
};

// Upper-bound estimate: coarse scan plus golden-section refinement over the
// one-parameter density families. Never a certified infimum.
inline MuEstimate mu_estimate(const SolitonModel& m, const QuadratureGrid& g,
                              double sigma, int budget = 200) {
  const auto mf = model_fields(m, g);
  MuEstimate best;

  auto eval_w = [&](Density d) -> double {
    normalize(m, g, d);
    return perelman_w(m, g, evaluate_density(m, g, d), mf, sigma);
  };

  struct Family {
    const char* name;
    double lo, hi;
    std::function<Density(double)> make;
  };
  std::vector<Family> families;
  families.push_back(
      {"param-gaussian", std::log(0.125), std::log(8.0), [](double t) {
         Density d;
         d.form = ParamGaussianDensity{std::exp(t), {}};
         return d;
       }});
  // tilt direction: linear on steady models; quadratic elsewhere, with the
  // lower end capped so a negative tilt cannot beat flat Gaussian decay
  const bool steady = m.kind == SolitonKind::Steady;
  const std::string tilt_tag = steady ? "dist" : "r2";
  double tilt_lo = -0.5;
  if (!steady && detail::first_flat(m)) tilt_lo = std::max(tilt_lo, -1.0 / (8.0 * m.tau));
  families.push_back({"tilted-reference", tilt_lo, 0.5, [tilt_tag](double t) {
                        Density d;
                        d.form = TiltedReferenceDensity{t, tilt_tag};
                        return d;
                      }});

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (const auto& fam : families) {
    // coarse scan
    const int n_scan = 9;
    double scan_best = 0.0, scan_val = std::numeric_limits<double>::infinity();
    int scan_idx = 0;
    for (int i = 0; i < n_scan; ++i) {
      if (best.evaluations >= budget) {
        best.incomplete = true;
        break;
      }
      const double t = fam.lo + (fam.hi - fam.lo) * i / (n_scan - 1);
      const double w = eval_w(fam.make(t));
      ++best.evaluations;
      if (w < scan_val) {
        scan_val = w;
        scan_best = t;
        scan_idx = i;
      }
    }
    if (scan_val < best.value) {
      best.value = scan_val;
      best.best_param = fam.name == std::string("param-gaussian")
                            ? std::exp(scan_best)
                            : scan_best;
      best.family = fam.name;
    }
    // golden-section refine around the scan minimum
    const double step = (fam.hi - fam.lo) / (n_scan - 1);
    double a = scan_idx > 0 ? scan_best - step : fam.lo;
    double b = scan_idx < n_scan - 1 ? scan_best + step : fam.hi;
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = 0.0, f2 = 0.0;
    bool have = false;
    while (b - a > 1e-9) {
      if (best.evaluations + (have ? 1 : 2) > budget) {
        best.incomplete = true;
        break;
      }
      if (!have) {
        f1 = eval_w(fam.make(x1));
        f2 = eval_w(fam.make(x2));
        best.evaluations += 2;
        have = true;
      }
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        f1 = eval_w(fam.make(x1));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        f2 = eval_w(fam.make(x2));
      }
      ++best.evaluations;
      const double t = f1 < f2 ? x1 : x2;
      const double v = std::min(f1, f2);
      if (v < best.value) {
        best.value = v;
        best.best_param =
            fam.name == std::string("param-gaussian") ? std::exp(t) : t;
        best.family = fam.name;
      }
    }
    if (best.evaluations >= budget) best.incomplete = true;
  }
  return best;
}

// nu estimate: minimum of mu over a sigma grid.
inline MuEstimate nu_estimate(const SolitonModel& m, const QuadratureGrid& g,
                              std::span<const double> sigmas, int budget_per_sigma = 120) {
  MuEstimate best;
  for (double s : sigmas) {
    auto e = mu_estimate(m, g, s, budget_per_sigma);
    best.evaluations += e.evaluations;
    best.incomplete = best.incomplete || e.incomplete;
    if (e.value < best.value) {
      best.value = e.value;
      best.best_param = e.best_param;
      best.family = e.family;
    }
  }
  return best;
}

}  // namespace soliton_entropy
