#pragma once

// Closed-form model solitons: kinds, geometry factors, potentials,
// curvatures, and the normalization fixing the invariants mu_s, mu_e, lambda.
//
// Conventions. A model carries a potential f = sum of per-factor closed
// forms plus a normalization offset. The reference probability measure is
//   shrinking/expanding:  e^{-f} dGamma / (4 pi tau)^{n/2}   (tau = 1 when expanding)
//   steady:               e^{-f} dGamma                      (no prefactor)
// and the offset is chosen in closed form so the reference has unit mass.
// The pointwise identities
//   shrinking:  tau (S + |grad f|^2) - f = mu_s,   S + lap f = n / (2 tau)
//   expanding:  S + |grad f|^2 - f = mu_e,         lap f = S + n/2
//   steady:     S + |grad f|^2 = lambda,           lap f = S
// are constant over the manifold for a correct catalog entry;
// soliton_residual measures their failure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace soliton_entropy {

enum class SolitonKind { Shrinking, Steady, Expanding };

inline std::string to_string(SolitonKind k) {
  switch (k) {
    case SolitonKind::Shrinking: return "shrinking";
    case SolitonKind::Steady: return "steady";
    case SolitonKind::Expanding: return "expanding";
  }
  return "?";
}

// Flat factor R^m with f-contribution quadratic_scale * |x|^2 + tilt . x.
// quadratic_scale is 1/(4 tau) on shrinkers and 1/4 on expanders.
struct FlatGaussian {
  int dim = 1;
  std::vector<double> tilt;  // linear term b; empty means zero
  double quadratic_scale = 0.25;
};

// Round sphere S^k of given radius; in a shrinker the radius must satisfy
// (dim - 1) / radius^2 = 1 / (2 tau) so that Ric = g / (2 tau).
struct RoundSphere {
  int dim = 2;
  double radius = 1.0;
};

// Hamilton's cigar: R^2 with metric (dx^2 + dy^2) / (1 + x^2 + y^2).
struct Cigar {};

// Compact Einstein factor used only for invariant/volume arithmetic; it has
// no pointwise chart. scalar_curv = dim * (Einstein constant). The diameter
// is not derivable from the other fields and is used only to bracket product
// ball volumes.
struct AbstractEinstein {
  int dim = 2;
  double volume = 1.0;
  double scalar_curv = 0.0;
  double diameter = 6.0;
};

using GeometryFactor = std::variant<FlatGaussian, RoundSphere, Cigar, AbstractEinstein>;

// Per-factor coordinates: Cartesian x for FlatGaussian, (colatitude,
// longitude) for RoundSphere, planar (x, y) for Cigar, empty for
// AbstractEinstein.
struct ChartPoint {
  std::vector<std::vector<double>> coords;
};

// Unit tangent vector, one component block per factor, expressed in an
// orthonormal frame of that factor. Only per-factor magnitudes matter for
// the curvature quadratic forms here, which are isotropic factor by factor.
struct TangentVector {
  std::vector<std::vector<double>> comps;
};

struct unsupported_chart_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct inconsistent_model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolitonModel {
  std::string id;
  SolitonKind kind = SolitonKind::Shrinking;
  std::vector<GeometryFactor> factors;
  double tau = 1.0;              // fixed to 1 for steady/expanding
  double potential_offset = 0.0; // normalization constant added to f
  int total_dim = 0;
};

inline int factor_dim(const GeometryFactor& f) {
  return std::visit(
      [](const auto& g) -> int {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Cigar>)
          return 2;
        else
          return g.dim;
      },
      f);
}

// Surface area of the round sphere S^k of the given radius.
inline double sphere_surface_area(int k, double radius) {
  const double a = 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
  return a * std::pow(radius, k);
}

// Volume of the unit ball in R^m.
inline double unit_ball_volume(int m) {
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

namespace detail {

inline double sq(double x) { return x * x; }

inline double cigar_r2(const std::vector<double>& xy) {
  return sq(xy.at(0)) + sq(xy.at(1));
}

// log of the closed-form factor integral  int e^{-f_factor} dGamma_factor.
inline double log_norm_integral(const GeometryFactor& f, SolitonKind, double /*tau*/) {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, FlatGaussian>) {
          // int exp(-qs |x|^2 - b.x) dx = (pi/qs)^{m/2} exp(|b|^2 / (4 qs))
          double b2 = 0.0;
          for (double bi : g.tilt) b2 += sq(bi);
          return 0.5 * g.dim * std::log(std::numbers::pi / g.quadratic_scale) +
                 b2 / (4.0 * g.quadratic_scale);
        } else if constexpr (std::is_same_v<T, RoundSphere>) {
          return std::log(sphere_surface_area(g.dim, g.radius));
        } else if constexpr (std::is_same_v<T, Cigar>) {
          // int e^{-log(1+r^2)} dGamma = int dx dy / (1+r^2)^2 = pi
          return std::log(std::numbers::pi);
        } else {
          return std::log(g.volume);
        }
      },
      f);
}

}  // namespace detail

// Assembles a model and computes its normalization offset in closed form.
// Performs no identity validation; use make_model for vetted catalog entries.
inline SolitonModel assemble_model(SolitonKind kind, std::vector<GeometryFactor> factors,
                                   double tau, std::string id) {
  SolitonModel m;
  m.kind = kind;
  m.factors = std::move(factors);
  m.tau = (kind == SolitonKind::Shrinking) ? tau : 1.0;
  m.id = std::move(id);
  for (const auto& f : m.factors) m.total_dim += factor_dim(f);
  double log_int = 0.0;
  for (const auto& f : m.factors) log_int += detail::log_norm_integral(f, kind, m.tau);
  const double prefactor =
      (kind == SolitonKind::Steady)
          ? 0.0
          : 0.5 * m.total_dim * std::log(4.0 * std::numbers::pi * m.tau);
  m.potential_offset = log_int - prefactor;
  return m;
}

// Potential f at a chart point (includes the normalization offset).
inline double potential(const SolitonModel& m, const ChartPoint& p) {
  double f = m.potential_offset;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const auto& c = p.coords.at(i);
    f += std::visit(
        [&](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, FlatGaussian>) {
            double q = 0.0, l = 0.0;
            for (int k = 0; k < g.dim; ++k) {
              q += detail::sq(c.at(k));
              if (k < static_cast<int>(g.tilt.size())) l += g.tilt[k] * c[k];
            }
            return g.quadratic_scale * q + l;
          } else if constexpr (std::is_same_v<T, Cigar>) {
            return std::log1p(detail::cigar_r2(c));
          } else {
            return 0.0;  // sphere and abstract factors carry constant f
          }
        },
        m.factors[i]);
  }
  return f;
}

inline double scalar_curvature(const SolitonModel& m, const ChartPoint& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    s += std::visit(
        [&](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, FlatGaussian>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, RoundSphere>) {
            return g.dim * (g.dim - 1) / detail::sq(g.radius);
          } else if constexpr (std::is_same_v<T, Cigar>) {
            return 4.0 / (1.0 + detail::cigar_r2(p.coords.at(i)));
          } else {
            return g.scalar_curv;
          }
        },
        m.factors[i]);
  }
  return s;
}

// Gradient of f in per-factor orthonormal frames: the Cartesian gradient on
// flat factors, the d/d(colatitude-arc) component on spheres (zero: f is
// constant there), and the geodesic-radial derivative on the cigar.
inline std::vector<std::vector<double>> potential_gradient(const SolitonModel& m,
                                                           const ChartPoint& p) {
  std::vector<std::vector<double>> out(m.factors.size());
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    out[i] = std::visit(
        [&](const auto& g) -> std::vector<double> {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, FlatGaussian>) {
            const auto& c = p.coords.at(i);
            std::vector<double> v(g.dim, 0.0);
            for (int k = 0; k < g.dim; ++k) {
              v[k] = 2.0 * g.quadratic_scale * c.at(k);
              if (k < static_cast<int>(g.tilt.size())) v[k] += g.tilt[k];
            }
            return v;
          } else if constexpr (std::is_same_v<T, RoundSphere>) {
            return {0.0};
          } else if constexpr (std::is_same_v<T, Cigar>) {
            // df/ds = 2 r / sqrt(1+r^2) along the geodesic radial direction
            const double r = std::sqrt(detail::cigar_r2(p.coords.at(i)));
            return {2.0 * r / std::sqrt(1.0 + r * r)};
          } else {
            return {};
          }
        },
        m.factors[i]);
  }
  return out;
}

inline double grad_potential_normsq(const SolitonModel& m, const ChartPoint& p) {
  double n2 = 0.0;
  for (const auto& block : potential_gradient(m, p))
    for (double v : block) n2 += detail::sq(v);
  return n2;
}

inline double laplacian_potential(const SolitonModel& m, const ChartPoint& p) {
  double l = 0.0;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    l += std::visit(
        [&](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, FlatGaussian>) {
            return 2.0 * g.quadratic_scale * g.dim;
          } else if constexpr (std::is_same_v<T, Cigar>) {
            return 4.0 / (1.0 + detail::cigar_r2(p.coords.at(i)));
          } else {
            return 0.0;
          }
        },
        m.factors[i]);
  }
  return l;
}

// Value of the pointwise identity that defines the invariant:
// tau (S + |grad f|^2) - f, or S + |grad f|^2 - f, or S + |grad f|^2.
inline double identity_value(const SolitonModel& m, const ChartPoint& p) {
  const double s = scalar_curvature(m, p);
  const double g2 = grad_potential_normsq(m, p);
  const double f = potential(m, p);
  switch (m.kind) {
    case SolitonKind::Shrinking: return m.tau * (s + g2) - f;
    case SolitonKind::Expanding: return s + g2 - f;
    case SolitonKind::Steady: return s + g2;
  }
  return 0.0;
}

// Residual of the trace identity (zero on a correct entry).
inline double trace_residual(const SolitonModel& m, const ChartPoint& p) {
  const double s = scalar_curvature(m, p);
  const double lf = laplacian_potential(m, p);
  switch (m.kind) {
    case SolitonKind::Shrinking: return s + lf - 0.5 * m.total_dim / m.tau;
    case SolitonKind::Expanding: return lf - s - 0.5 * m.total_dim;
    case SolitonKind::Steady: return lf - s;
  }
  return 0.0;
}

// Base point: flat origin, sphere pole, cigar tip.
inline ChartPoint base_point(const SolitonModel& m) {
  ChartPoint p;
  p.coords.resize(m.factors.size());
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, FlatGaussian>)
            p.coords[i].assign(g.dim, 0.0);
          else if constexpr (std::is_same_v<T, RoundSphere>)
            p.coords[i] = {0.0, 0.0};
          else if constexpr (std::is_same_v<T, Cigar>)
            p.coords[i] = {0.0, 0.0};
          else
            p.coords[i] = {};
        },
        m.factors[i]);
  }
  return p;
}

// Deterministic low-discrepancy sample points for identity checks.
inline std::vector<ChartPoint> sample_points(const SolitonModel& m, int count) {
  std::vector<ChartPoint> pts;
  pts.reserve(count);
  int channel = 0;
  auto seq = [&channel](int j) {
    const double x = 0.6180339887498949 * (j + 1) + 0.4142135623730951 * (channel + 1);
    return x - std::floor(x);
  };
  for (int j = 0; j < count; ++j) {
    ChartPoint p;
    p.coords.resize(m.factors.size());
    channel = 0;
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
      std::visit(
          [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, FlatGaussian>) {
              p.coords[i].resize(g.dim);
              for (int k = 0; k < g.dim; ++k) {
                p.coords[i][k] = 4.0 * (seq(j) - 0.5);
                ++channel;
              }
            } else if constexpr (std::is_same_v<T, RoundSphere>) {
              p.coords[i] = {0.1 + (std::numbers::pi - 0.2) * seq(j), 0.0};
              ++channel;
              p.coords[i][1] = 2.0 * std::numbers::pi * seq(j);
              ++channel;
            } else if constexpr (std::is_same_v<T, Cigar>) {
              const double r = 3.0 * seq(j);
              ++channel;
              const double a = 2.0 * std::numbers::pi * seq(j);
              ++channel;
              p.coords[i] = {r * std::cos(a), r * std::sin(a)};
            } else {
              p.coords[i] = {};
            }
          },
          m.factors[i]);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

// Max deviation of the defining identity across samples plus the max trace
// residual. A correct catalog entry stays below 1e-10.
inline double soliton_residual(const SolitonModel& m, const std::vector<ChartPoint>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("soliton_residual: need at least 2 sample points");
  const double ref = identity_value(m, samples.front());
  double dev = 0.0, tr = 0.0;
  for (const auto& p : samples) {
    dev = std::max(dev, std::abs(identity_value(m, p) - ref));
    tr = std::max(tr, std::abs(trace_residual(m, p)));
  }
  return dev + tr;
}

// The soliton invariant mu_s, mu_e, or lambda. Requires a consistent model:
// the identity residual over deterministic samples must be below tolerance.
inline double mu_invariant(const SolitonModel& m, double residual_tol = 1e-8) {
  const double res = soliton_residual(m, sample_points(m, 32));
  if (!(res <= residual_tol))
    throw inconsistent_model_error("mu_invariant: identity residual " + std::to_string(res) +
                                   " exceeds tolerance on model " + m.id);
  return identity_value(m, base_point(m));
}

inline bool has_abstract_factor(const SolitonModel& m) {
  for (const auto& f : m.factors)
    if (std::holds_alternative<AbstractEinstein>(f)) return true;
  return false;
}

namespace detail {

// Coefficient kappa(p) with (Ric + Hess f)|_factor = kappa * g|_factor.
// Every catalog factor has an isotropic form: shrinker factors give
// 1/(2 tau) (the soliton equation itself), expander flat gives 1/2,
// expander Einstein gives 2 S/k + 1/2, the cigar gives S(p).
inline double cd_kappa(const GeometryFactor& f, const SolitonModel& m,
                       const std::vector<double>& coords) {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, FlatGaussian>) {
          return 2.0 * g.quadratic_scale;
        } else if constexpr (std::is_same_v<T, RoundSphere>) {
          return (g.dim - 1) / sq(g.radius);
        } else if constexpr (std::is_same_v<T, Cigar>) {
          return 4.0 / (1.0 + cigar_r2(coords));
        } else {
          // Hess f = 0 on the factor; Ric = (S/k) g from the Einstein
          // constant. For expanders Ric + Hess f = 2 Ric + g/2.
          const double einstein = g.scalar_curv / g.dim;
          if (m.kind == SolitonKind::Expanding) return 2.0 * einstein + 0.5;
          return einstein;
        }
      },
      f);
}

}  // namespace detail

// Min over (sample, direction) of (Ric + Hess f)(v, v); the model satisfies
// the curvature-dimension bound C(K, infinity) with K equal to this value
// over the sampled region. With an AbstractEinstein factor present the bound
// comes from Einstein constants alone; query has_abstract_factor for the flag.
inline double cd_lower_bound(const SolitonModel& m, const std::vector<ChartPoint>& samples,
                             const std::vector<TangentVector>& directions) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    for (const auto& v : directions) {
      double q = 0.0;
      for (std::size_t i = 0; i < m.factors.size(); ++i) {
        double n2 = 0.0;
        if (i < v.comps.size())
          for (double c : v.comps[i]) n2 += detail::sq(c);
        if (n2 == 0.0) continue;
        q += detail::cd_kappa(m.factors[i], m, p.coords.at(i)) * n2;
      }
      best = std::min(best, q);
    }
  }
  return best;
}

// Convenience: per-factor coordinate directions at deterministic samples.
inline double cd_lower_bound(const SolitonModel& m, int sample_count = 64) {
  std::vector<TangentVector> dirs;
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    TangentVector v;
    v.comps.resize(m.factors.size());
    v.comps[i] = {1.0};
    dirs.push_back(std::move(v));
  }
  return cd_lower_bound(m, sample_points(m, sample_count), dirs);
}

namespace detail {

// Geodesic distance on one factor; throws for unsupported pairs.
inline double factor_distance(const GeometryFactor& f, const std::vector<double>& a,
                              const std::vector<double>& b) {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, FlatGaussian>) {
          double d2 = 0.0;
          for (int k = 0; k < g.dim; ++k) d2 += sq(a.at(k) - b.at(k));
          return std::sqrt(d2);
        } else if constexpr (std::is_same_v<T, RoundSphere>) {
          const double c = std::cos(a.at(0)) * std::cos(b.at(0)) +
                           std::sin(a.at(0)) * std::sin(b.at(0)) * std::cos(a.at(1) - b.at(1));
          return g.radius * std::acos(std::clamp(c, -1.0, 1.0));
        } else if constexpr (std::is_same_v<T, Cigar>) {
          // Supported pairs: both points on a common line through the
          // origin (same or opposite rays), where the line is a geodesic
          // and arclength integrates ds = dr / sqrt(1 + r^2).
          const double ra = std::sqrt(cigar_r2(a)), rb = std::sqrt(cigar_r2(b));
          const double sa = std::asinh(ra), sb = std::asinh(rb);
          if (ra < 1e-14 || rb < 1e-14) return std::abs(sa - sb);
          const double dot = a.at(0) * b.at(0) + a.at(1) * b.at(1);
          const double cosang = std::clamp(dot / (ra * rb), -1.0, 1.0);
          if (cosang > 1.0 - 1e-12) return std::abs(sa - sb);
          if (cosang < -1.0 + 1e-12) return sa + sb;
          throw unsupported_chart_error("geodesic_distance: general cigar pairs unsupported");
        } else {
          throw unsupported_chart_error("geodesic_distance: abstract factor has no chart");
        }
      },
      f);
}

}  // namespace detail

// Product metric distance: the Pythagorean combination of factor distances.
inline double geodesic_distance(const SolitonModel& m, const ChartPoint& p, const ChartPoint& q) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < m.factors.size(); ++i)
    d2 += detail::sq(detail::factor_distance(m.factors[i], p.coords.at(i), q.coords.at(i)));
  return std::sqrt(d2);
}

// ---------------------------------------------------------------------------
// Catalog ids.
//
//   gaussian-shrinker:n=<m>[,tilt=<b>][,tau=<t>]
//   sphere:n=<k>[,tau=<t>]                     (radius fixed by the shrinker equation)
//   cylinder:k=<k>,m=<m>[,tau=<t>]             (S^k x R^m shrinker)
//   cigar                                      (steady)
//   gaussian-expander:n=<m>[,tilt=<b>]
//   einstein-expander-product:k=<k>,m=<m>,vol=<v>[,diam=<d>]
//
// Numeric values accept a trailing "pi" multiplier (vol=8pi).

namespace detail {

inline double parse_number(const std::string& tok) {
  std::size_t pos = 0;
  double v;
  if (tok.size() >= 2 && tok.substr(tok.size() - 2) == "pi") {
    const std::string head = tok.substr(0, tok.size() - 2);
    v = head.empty() ? 1.0 : std::stod(head, &pos);
    if (!head.empty() && pos != head.size())
      throw std::invalid_argument("bad numeric token: " + tok);
    return v * std::numbers::pi;
  }
  v = std::stod(tok, &pos);
  if (pos != tok.size()) throw std::invalid_argument("bad numeric token: " + tok);
  return v;
}

struct IdParams {
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;

  bool has(const std::string& k) const {
    for (const auto& [a, b] : kv)
      if (a == k) return true;
    return false;
  }
  double num(const std::string& k, double fallback) const {
    for (const auto& [a, b] : kv)
      if (a == k) return parse_number(b);
    return fallback;
  }
};

inline IdParams parse_id(std::string_view id) {
  IdParams out;
  const auto colon = id.find(':');
  out.name = std::string(id.substr(0, colon));
  if (colon == std::string_view::npos) return out;
  std::string rest(id.substr(colon + 1));
  std::size_t start = 0;
  while (start <= rest.size()) {
    auto comma = rest.find(',', start);
    std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
    if (!item.empty()) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("bad id parameter '" + item + "' in " + std::string(id));
      out.kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// Builds a vetted catalog model from its string id. Throws
// std::invalid_argument for unknown ids or parameters that violate the
// soliton equations.
inline SolitonModel make_model(std::string_view id) {
  using detail::IdParams;
  const IdParams p = detail::parse_id(id);
  auto as_int = [&](const std::string& k, int fallback) {
    const double v = p.num(k, fallback);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-12) throw std::invalid_argument("integer expected for " + k);
    return i;
  };

  if (p.name == "gaussian-shrinker") {
    const int n = as_int("n", 2);
    const double tau = p.num("tau", 1.0), b = p.num("tilt", 0.0);
    if (n < 1 || tau <= 0) throw std::invalid_argument("bad gaussian-shrinker parameters");
    FlatGaussian g{n, {}, 1.0 / (4.0 * tau)};
    if (b != 0.0) {
      g.tilt.assign(n, 0.0);
      g.tilt[0] = b;
    }
    return assemble_model(SolitonKind::Shrinking, {g}, tau, std::string(id));
  }
  if (p.name == "sphere") {
    const int k = as_int("n", 2);
    const double tau = p.num("tau", 1.0);
    if (k < 2 || tau <= 0) throw std::invalid_argument("bad sphere parameters");
    const double radius = std::sqrt(2.0 * (k - 1) * tau);
    return assemble_model(SolitonKind::Shrinking, {RoundSphere{k, radius}}, tau,
                          std::string(id));
  }
  if (p.name == "cylinder") {
    const int k = as_int("k", 2), m = as_int("m", 2);
    const double tau = p.num("tau", 1.0);
    if (k < 2 || m < 1 || tau <= 0) throw std::invalid_argument("bad cylinder parameters");
    const double radius = std::sqrt(2.0 * (k - 1) * tau);
    return assemble_model(SolitonKind::Shrinking,
                          {RoundSphere{k, radius}, FlatGaussian{m, {}, 1.0 / (4.0 * tau)}},
                          tau, std::string(id));
  }
  if (p.name == "cigar") {
    return assemble_model(SolitonKind::Steady, {Cigar{}}, 1.0, std::string(id));
  }
  if (p.name == "gaussian-expander") {
    const int n = as_int("n", 2);
    const double b = p.num("tilt", 0.0);
    if (n < 1) throw std::invalid_argument("bad gaussian-expander parameters");
    FlatGaussian g{n, {}, 0.25};
    if (b != 0.0) {
      g.tilt.assign(n, 0.0);
      g.tilt[0] = b;
    }
    return assemble_model(SolitonKind::Expanding, {g}, 1.0, std::string(id));
  }
  if (p.name == "einstein-expander-product") {
    const int k = as_int("k", 2), m = as_int("m", 2);
    const double vol = p.num("vol", 8.0 * std::numbers::pi);
    const double diam = p.num("diam", 6.0);
    if (k < 2 || m < 1 || vol <= 0 || diam <= 0)
      throw std::invalid_argument("bad einstein-expander-product parameters");
    // Expander equation with constant f on the factor forces Ric = -g/2.
    AbstractEinstein e{k, vol, -0.5 * k, diam};
    return assemble_model(SolitonKind::Expanding, {e, FlatGaussian{m, {}, 0.25}}, 1.0,
                          std::string(id));
  }
  throw std::invalid_argument("unknown model id: " + std::string(id));
}

// Default catalog roster (parameterized variants of these ids also resolve).
inline std::vector<std::string> catalog_ids() {
  return {
      "gaussian-shrinker:n=1", "gaussian-shrinker:n=2", "gaussian-shrinker:n=3",
      "gaussian-shrinker:n=4", "sphere:n=2",            "sphere:n=4",
      "cylinder:k=2,m=2",      "cylinder:k=3,m=1",      "cigar",
      "gaussian-expander:n=2", "gaussian-expander:n=3",
      "einstein-expander-product:k=2,m=2,vol=8pi",
  };
}

}  // namespace soliton_entropy
