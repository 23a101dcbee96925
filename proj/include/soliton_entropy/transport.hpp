#pragma once

// Wasserstein-2 distances and the HWI inequality checker.
//
// Three computation paths:
//   quantile-1d:    exact quantile coupling of two measures on a line,
//                   piecewise-linear CDFs on a fine uniform mesh
//   radial:         the same reduction applied to the radial laws of
//                   radially symmetric measures on a flat factor (the
//                   optimal coupling of such measures is radial; standard
//                   optimal-transport fact, assumed here)
//   discrete-exact: exact network-simplex solution of the discrete coupling
//                   program, used on sphere grids with geodesic costs
//
// All solver paths are deterministic: fixed mesh construction, fixed pivot
// order with lexicographic tie-breaking.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "soliton_entropy/catalog.hpp"
#include "soliton_entropy/density.hpp"
#include "soliton_entropy/functionals.hpp"
#include "soliton_entropy/grid.hpp"
#include "soliton_entropy/report.hpp"
#include "soliton_entropy/util.hpp"

namespace soliton_entropy {

struct PlanEntry {
  int i = 0, j = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<double> source, target;  // marginal masses
  std::vector<PlanEntry> entries;      // nonzero couplings, sorted by (i, j)
  double cost = 0.0;

  std::vector<double> row_sums() const {
    std::vector<double> r(source.size(), 0.0);
    for (const auto& e : entries) r[e.i] += e.mass;
    return r;
  }
  std::vector<double> col_sums() const {
    std::vector<double> c(target.size(), 0.0);
    for (const auto& e : entries) c[e.j] += e.mass;
    return c;
  }
};

struct W2Result {
  double value = 0.0;
  std::string method;           // quantile-1d | radial | discrete-exact
  double error_estimate = 0.0;  // mesh-refinement delta
  bool available = false;
  std::optional<TransportPlan> plan;
};

inline void write_plan_csv(const TransportPlan& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plan: " + path);
  out << "i,j,mass\n";
  char line[96];
  for (const auto& e : p.entries) {
    std::snprintf(line, sizeof line, "%d,%d,%.17g\n", e.i, e.j, e.mass);
    out << line;
  }
}

// ---------------------------------------------------------------------------
// Exact solver for the discrete coupling program (uncapacitated network
// simplex on the complete bipartite graph, artificial-root start, block
// pivoting, deterministic tie-breaks).

namespace detail {

class TransportSimplex {
 public:
  TransportSimplex(const double* cost, int ns, int nt) : cost_(cost), ns_(ns), nt_(nt) {
    n_ = ns_ + nt_;
    root_ = n_;
    nr_ = ns_ * nt_;
    double cmax = 0.0;
    for (int a = 0; a < nr_; ++a) {
      if (!std::isfinite(cost_[a])) throw std::invalid_argument("transport: cost not finite");
      cmax = std::max(cmax, std::abs(cost_[a]));
    }
    big_ = (cmax + 1.0) * (n_ + 1);
    eps_ = 1e-12 * (cmax + 1.0);
  }

  // supply: +mass for sources (0..ns-1), -mass for sinks (ns..n-1), balanced.
  void solve(const std::vector<double>& supply) {
    flow_.assign(nr_ + n_ + 1, 0.0);
    in_tree_.assign(nr_ + n_ + 1, false);
    art_to_root_.assign(n_, true);
    adj_.assign(n_ + 1, {});
    for (int v = 0; v < n_; ++v) {
      const int a = nr_ + v;
      art_to_root_[v] = supply[v] >= 0.0;
      flow_[a] = std::abs(supply[v]);
      in_tree_[a] = true;
      adj_[v].push_back(a);
      adj_[root_].push_back(a);
    }
    rebuild_tree();

    const int block = std::max(64, static_cast<int>(std::sqrt(double(nr_))));
    int next = 0;
    while (true) {
      int entering = -1;
      double best = -eps_;
      int scanned = 0;
      while (scanned < nr_) {
        const int stop = std::min(nr_ - scanned, block);
        for (int k = 0; k < stop; ++k) {
          const int a = next;
          next = next + 1 == nr_ ? 0 : next + 1;
          const double rc = cost_[a] + pi_[arc_src(a)] - pi_[arc_dst(a)];
          if (rc < best) {
            best = rc;
            entering = a;
          }
        }
        scanned += stop;
        if (entering >= 0) break;
      }
      if (entering < 0) break;
      pivot(entering);
    }
  }

  double flow_on(int i, int j) const { return flow_[i * nt_ + j]; }
  double artificial_residual() const {
    double r = 0.0;
    for (int v = 0; v < n_; ++v) r = std::max(r, flow_[nr_ + v]);
    return r;
  }

 private:
  int arc_src(int a) const {
    if (a < nr_) return a / nt_;
    const int v = a - nr_;
    return art_to_root_[v] ? v : root_;
  }
  int arc_dst(int a) const {
    if (a < nr_) return ns_ + a % nt_;
    const int v = a - nr_;
    return art_to_root_[v] ? root_ : v;
  }

  void rebuild_tree() {
    parent_.assign(n_ + 1, -1);
    pred_.assign(n_ + 1, -1);
    depth_.assign(n_ + 1, 0);
    pi_.assign(n_ + 1, 0.0);
    std::vector<int> stack{root_};
    std::vector<bool> seen(n_ + 1, false);
    seen[root_] = true;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (int a : adj_[p]) {
        const int s = arc_src(a), t = arc_dst(a);
        const int z = s == p ? t : s;
        if (seen[z]) continue;
        seen[z] = true;
        parent_[z] = p;
        pred_[z] = a;
        depth_[z] = depth_[p] + 1;
        const double c = a < nr_ ? cost_[a] : big_;
        pi_[z] = s == p ? pi_[p] + c : pi_[p] - c;
        stack.push_back(z);
      }
    }
  }

  void pivot(int entering) {
    const int u = arc_src(entering), v = arc_dst(entering);
    // cycle: entering u->v plus the tree path v..u; flow increases along
    // the cycle direction and decreases on arcs pointing against it
    double delta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    auto consider = [&](int arc, bool against) {
      if (!against) return;
      if (flow_[arc] < delta) {
        delta = flow_[arc];
        leaving = arc;
      }
    };
    int x = u, y = v;
    while (x != y) {
      if (depth_[x] >= depth_[y]) {
        const int a = pred_[x];
        // cycle direction on the u-side runs parent -> child
        consider(a, arc_src(a) == x);
        x = parent_[x];
      } else {
        const int a = pred_[y];
        // cycle direction on the v-side runs child -> parent
        consider(a, arc_dst(a) == y);
        y = parent_[y];
      }
    }
    if (leaving < 0) throw std::logic_error("transport: unbounded pivot");

    flow_[entering] += delta;
    x = u;
    y = v;
    while (x != y) {
      if (depth_[x] >= depth_[y]) {
        const int a = pred_[x];
        flow_[a] += arc_src(a) == x ? -delta : delta;
        x = parent_[x];
      } else {
        const int a = pred_[y];
        flow_[a] += arc_dst(a) == y ? -delta : delta;
        y = parent_[y];
      }
    }

    auto drop = [&](std::vector<int>& lst, int a) {
      for (std::size_t k = 0; k < lst.size(); ++k)
        if (lst[k] == a) {
          lst[k] = lst.back();
          lst.pop_back();
          return;
        }
    };
    in_tree_[leaving] = false;
    drop(adj_[arc_src(leaving)], leaving);
    drop(adj_[arc_dst(leaving)], leaving);
    in_tree_[entering] = true;
    adj_[u].push_back(entering);
    adj_[v].push_back(entering);
    rebuild_tree();
  }

  const double* cost_;
  int ns_, nt_, n_, nr_, root_;
  double big_ = 0.0, eps_ = 0.0;
  std::vector<double> flow_, pi_;
  std::vector<int> parent_, pred_, depth_;
  std::vector<std::vector<int>> adj_;
  std::vector<bool> in_tree_;
  std::vector<bool> art_to_root_;
};

}  // namespace detail

// Exact optimal coupling for given masses and a dense row-major cost matrix.
inline TransportPlan w2_discrete_exact(const std::vector<double>& cost,
                                       const std::vector<double>& source,
                                       const std::vector<double>& target) {
  const int ns = static_cast<int>(source.size());
  const int nt = static_cast<int>(target.size());
  if (ns <= 0 || nt <= 0 || cost.size() != static_cast<std::size_t>(ns) * nt)
    throw std::invalid_argument("transport: bad problem dimensions");
  double sa = 0.0, sb = 0.0;
  for (double m : source) {
    if (!(m >= 0.0)) throw std::invalid_argument("transport: negative source mass");
    sa += m;
  }
  for (double m : target) {
    if (!(m >= 0.0)) throw std::invalid_argument("transport: negative target mass");
    sb += m;
  }
  if (!(sa > 0.0) || std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
    throw std::invalid_argument("transport: masses must balance");

  // exact fp balance: the last sink absorbs the rounding residual
  std::vector<double> supply(ns + nt);
  for (int i = 0; i < ns; ++i) supply[i] = source[i];
  double acc = 0.0;
  for (int j = 0; j + 1 < nt; ++j) {
    supply[ns + j] = -target[j] * (sa / sb);
    acc += supply[ns + j];
  }
  supply[ns + nt - 1] = -(sa + acc);

  detail::TransportSimplex solver(cost.data(), ns, nt);
  solver.solve(supply);

  TransportPlan plan;
  plan.source = source;
  plan.target = target;
  std::vector<double> cost_terms;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      const double f = solver.flow_on(i, j);
      if (f > 0.0) {
        plan.entries.push_back({i, j, f});
        cost_terms.push_back(f * cost[static_cast<std::size_t>(i) * nt + j]);
      }
    }
  plan.cost = pairwise_sum(cost_terms);
  return plan;
}

// ---------------------------------------------------------------------------
// Quantile coupling of two cell-mass measures sharing the breakpoints x.

namespace detail {

inline double quantile_w2_sq(const std::vector<double>& x, std::vector<double> ma,
                             std::vector<double> mb) {
  const std::size_t n = ma.size();
  if (x.size() != n + 1 || mb.size() != n)
    throw std::invalid_argument("quantile_w2_sq: size mismatch");
  double ta = 0.0, tb = 0.0;
  for (double v : ma) ta += v;
  for (double v : mb) tb += v;
  if (!(ta > 0.0) || !(tb > 0.0))
    throw std::invalid_argument("quantile_w2_sq: zero mass");
  for (double& v : ma) v /= ta;
  for (double& v : mb) v /= tb;

  std::vector<double> ca(n + 1, 0.0), cb(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    ca[i + 1] = ca[i] + ma[i];
    cb[i + 1] = cb[i] + mb[i];
  }
  ca[n] = cb[n] = 1.0;

  auto qval = [&](const std::vector<double>& c, const std::vector<double>& m,
                  std::size_t cell, double q) {
    if (m[cell] <= 0.0) return x[cell];
    // rounding in the cumulative sums can push q outside the cell range by a
    // few ulps; on near-empty tail cells that would extrapolate wildly
    const double t = std::clamp((q - c[cell]) / m[cell], 0.0, 1.0);
    return x[cell] + t * (x[cell + 1] - x[cell]);
  };

  std::vector<double> terms;
  std::size_t ia = 0, ib = 0;
  double q = 0.0;
  while (ma[ia] <= 0.0 && ia + 1 < n) ++ia;
  while (mb[ib] <= 0.0 && ib + 1 < n) ++ib;
  while (q < 1.0) {
    const double qa = ca[ia + 1], qb = cb[ib + 1];
    const double qn = std::min(1.0, std::min(qa, qb));
    if (qn > q) {
      const double d0 = qval(ca, ma, ia, q) - qval(cb, mb, ib, q);
      const double d1 = qval(ca, ma, ia, qn) - qval(cb, mb, ib, qn);
      terms.push_back((qn - q) / 3.0 * (d0 * d0 + d0 * d1 + d1 * d1));
      q = qn;
    }
    if (q >= 1.0) break;
    while (ca[ia + 1] <= q && ia + 1 < n) ++ia;
    while (cb[ib + 1] <= q && ib + 1 < n) ++ib;
    if (ca[ia + 1] <= q && cb[ib + 1] <= q) break;  // exhausted by rounding
  }
  return std::max(0.0, pairwise_sum(terms));
}

inline bool radially_symmetric(const SolitonModel& m, const Density& d) {
  const auto* flat = std::get_if<FlatGaussian>(&m.factors.at(0));
  if (!flat) return false;
  if (flat->dim == 1) return !std::holds_alternative<GriddedDensity>(d.form);
  if (const auto* pg = std::get_if<ParamGaussianDensity>(&d.form)) {
    for (double c : pg->center)
      if (c != 0.0) return false;
    return true;
  }
  if (const auto* tr = std::get_if<TiltedReferenceDensity>(&d.form))
    return tr->eps == 0.0 || tr->phi == "r2" || tr->phi == "dist";
  return false;
}

}  // namespace detail

// W2 between two densities on a single-flat-factor model via monotone
// rearrangement of the radial (dim >= 2) or linear (dim 1) laws.
inline W2Result w2_radial(const SolitonModel& m, const Density& da, const Density& db,
                          int cells = 1 << 17) {
  if (m.factors.size() != 1 || !std::holds_alternative<FlatGaussian>(m.factors[0]))
    throw std::invalid_argument("w2_radial: model must have a single flat factor");
  if (!detail::radially_symmetric(m, da) || !detail::radially_symmetric(m, db))
    throw std::invalid_argument(
        "w2_radial: densities not radially symmetric; use w2_discrete_exact");
  const auto& flat = std::get<FlatGaussian>(m.factors[0]);
  const double R = detail::auto_cutoff(m, flat, 8.0) + 2.0;
  const double lo = flat.dim == 1 ? -R : 0.0;

  auto cell_masses = [&](const Density& d, int nc) {
    std::vector<double> mass(nc, 0.0);
    const double h = (R - lo) / nc;
    const double off = 0.5 / std::numbers::sqrt3;  // 2-point Gauss nodes
    ChartPoint p;
    p.coords.assign(1, std::vector<double>(flat.dim, 0.0));
    for (int i = 0; i < nc; ++i) {
      const double mid = lo + (i + 0.5) * h;
      double acc = 0.0;
      for (double xg : {mid - off * h, mid + off * h}) {
        p.coords[0][0] = xg;
        double w = std::exp(log_density(m, d, p));
        if (flat.dim >= 2) w *= std::pow(xg, flat.dim - 1);
        acc += w;
      }
      mass[i] = acc * h * 0.5;
    }
    return mass;
  };

  auto edges = [&](int nc) {
    std::vector<double> x(nc + 1);
    for (int i = 0; i <= nc; ++i) x[i] = lo + (R - lo) * i / nc;
    return x;
  };

  const auto mass_a = cell_masses(da, cells);
  const auto mass_b = cell_masses(db, cells);
  const double fine = std::sqrt(detail::quantile_w2_sq(edges(cells), mass_a, mass_b));

  // coarse estimate from pairwise-merged cells bounds the mesh error
  std::vector<double> ca(cells / 2), cb(cells / 2);
  for (int i = 0; i < cells / 2; ++i) {
    ca[i] = mass_a[2 * i] + mass_a[2 * i + 1];
    cb[i] = mass_b[2 * i] + mass_b[2 * i + 1];
  }
  const double coarse = std::sqrt(detail::quantile_w2_sq(edges(cells / 2), ca, cb));

  W2Result r;
  r.value = fine;
  r.method = flat.dim == 1 ? "quantile-1d" : "radial";
  r.error_estimate = std::abs(fine - coarse);
  r.available = true;
  return r;
}

// W2 between two zonal densities on a lone round 2-sphere: exact coupling on
// a longitude-latitude grid, refinement delta from a doubled grid.
inline W2Result w2_sphere_discrete(const SolitonModel& m, const Density& da,
                                   const Density& db, int n_theta = 12, int n_phi = 24,
                                   bool want_plan = false) {
  auto solve_at = [&](int nt, int np, bool keep) {
    auto grid = build_sphere_surface_grid(m, nt, np);
    const std::size_t n = grid.nodes.size();
    std::vector<double> wa(n), wb(n);
    for (std::size_t i = 0; i < n; ++i) {
      wa[i] = grid.weights[i] * std::exp(log_density(m, da, grid.nodes[i]));
      wb[i] = grid.weights[i] * std::exp(log_density(m, db, grid.nodes[i]));
    }
    double ta = 0.0, tb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ta += wa[i];
      tb += wb[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      wa[i] /= ta;
      wb[i] /= tb;
    }
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double d = geodesic_distance(m, grid.nodes[i], grid.nodes[j]);
        cost[i * n + j] = d * d;
      }
    auto plan = w2_discrete_exact(cost, wa, wb);
    const double v = std::sqrt(std::max(0.0, plan.cost));
    return std::pair<double, std::optional<TransportPlan>>(
        v, keep ? std::optional<TransportPlan>(std::move(plan)) : std::nullopt);
  };

  auto [v_coarse, plan_coarse] = solve_at(n_theta, n_phi, false);
  auto [v_fine, plan_fine] = solve_at(2 * n_theta, 2 * n_phi, want_plan);

  W2Result r;
  r.value = v_fine;
  r.method = "discrete-exact";
  r.error_estimate = std::abs(v_fine - v_coarse);
  r.available = true;
  r.plan = std::move(plan_fine);
  return r;
}

// W2 from the density to the model's reference measure, by whichever method
// the model admits; unavailable (available = false) otherwise.
inline W2Result w2_to_reference(const SolitonModel& m, const Density& d,
                                int cells = 1 << 17) {
  W2Result none;
  if (m.factors.size() != 1) return none;
  if (std::holds_alternative<FlatGaussian>(m.factors[0])) {
    try {
      return w2_radial(m, d, reference_density(m), cells);
    } catch (const std::invalid_argument&) {
      return none;
    }
  }
  if (const auto* sp = std::get_if<RoundSphere>(&m.factors[0])) {
    if (sp->dim != 2 || std::holds_alternative<GriddedDensity>(d.form)) return none;
    return w2_sphere_discrete(m, d, reference_density(m));
  }
  return none;
}

// ---------------------------------------------------------------------------
// HWI inequality: H <= W2 sqrt(I) - (K/2) W2^2 with K the model's
// curvature-dimension lower bound.

inline FunctionalReport hwi_gap(const SolitonModel& m, const QuadratureGrid& g,
                                const Density& d, double tol = 1e-6) {
  FunctionalReport r;
  r.check_id = "hwi";
  r.model = m.id;
  r.density = describe(d);
  r.sigma = m.tau;
  r.tolerance = tol;
  r.grid = grid_certificate(g);

  const auto w2 = w2_to_reference(m, d);
  if (!w2.available) {
    r.verdict = Verdict::NotApplicable;
    return r;
  }
  const auto mf = model_fields(m, g);
  const auto ev = evaluate_density(m, g, d);
  const double H = relative_entropy(m, g, ev, mf);
  const double I = fisher_information(m, g, ev, mf);
  const double K = cd_lower_bound(m);

  r.h_value = H;
  r.i_value = I;
  r.value = w2.value * std::sqrt(std::max(0.0, I)) - 0.5 * K * w2.value * w2.value;
  r.bound = H;
  r.gap = r.value - H;
  r.verdict = verdict_from_gap(r.gap, tol);
  r.extra.emplace_back("w2", w2.value);
  r.extra.emplace_back("w2_error", w2.error_estimate);
  r.extra.emplace_back("cd_lower_bound", K);
  if (K > 0.0) r.extra.emplace_back("lsi_from_hwi_gap", I / (2.0 * K) - H);
  return r;
}

}  // namespace soliton_entropy
