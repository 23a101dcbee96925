// Optimal transport: the exact discrete solver against brute force, the
// radial quantile path against closed forms and the discrete solver, and
// the entropy–transport–information inequality they feed.
#include <catch2/catch_amalgamated.hpp>
#include <soliton_entropy/transport.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace soliton_entropy;
using Catch::Matchers::WithinAbs;

TEST_CASE("discrete solver handles trivial couplings", "[transport]") {
  const auto p = w2_discrete_exact({3.5}, {1.0}, {1.0});
  CHECK(p.cost == 3.5);
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].mass == 1.0);
  const auto q = w2_discrete_exact({0, 1, 1, 0}, {0.5, 0.5}, {0.5, 0.5});
  CHECK(q.cost == 0.0);
}

TEST_CASE("discrete solver matches permutation brute force", "[transport]") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> c(25);
    for (auto& v : c) v = u(rng);
    const std::vector<double> mass(5, 0.2);
    const auto p = w2_discrete_exact(c, mass, mass);
    std::vector<int> perm{0, 1, 2, 3, 4};
    double best = 1e300;
    do {
      double t = 0;
      for (int i = 0; i < 5; ++i) t += 0.2 * c[i * 5 + perm[i]];
      best = std::min(best, t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    worst = std::max(worst, std::abs(p.cost - best));
  }
  CHECK_THAT(worst, WithinAbs(0.0, 1e-12));
}

TEST_CASE("discrete plans are feasible with basic support", "[transport]") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> a(13), b(9), c(13 * 9);
  double sa = 0, sb = 0;
  for (auto& v : a) sa += (v = u(rng));
  for (auto& v : b) sb += (v = u(rng));
  for (auto& v : a) v /= sa;
  for (auto& v : b) v /= sb;
  for (auto& v : c) v = u(rng) * 5;
  const auto p = w2_discrete_exact(c, a, b);
  const auto rs = p.row_sums(), cs = p.col_sums();
  double worst = 0;
  for (int i = 0; i < 13; ++i) worst = std::max(worst, std::abs(rs[i] - a[i]));
  for (int j = 0; j < 9; ++j) worst = std::max(worst, std::abs(cs[j] - b[j]));
  CHECK_THAT(worst, WithinAbs(0.0, 1e-12));
  CHECK(p.entries.size() <= 21);  // ns + nt - 1 basic entries
}

TEST_CASE("radial distance reproduces the Gaussian closed form", "[transport]") {
  for (int n : {1, 2, 3}) {
    const auto m = make_model("gaussian-shrinker:n=" + std::to_string(n));
    Density d;
    d.form = ParamGaussianDensity{2.0, {}};
    d.normalized = true;
    const auto r = w2_radial(m, d, reference_density(m));
    INFO("n=" << n);
    CHECK_THAT(r.value, WithinAbs(std::sqrt(2.0 * n) * (std::sqrt(2.0) - 1.0), 1e-7));
  }
}

TEST_CASE("radial distance is a metric on test densities", "[transport]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  Density a;
  a.form = ParamGaussianDensity{1e-3, {3.0}};
  a.normalized = true;
  Density b;
  b.form = ParamGaussianDensity{1e-3, {1.0}};
  b.normalized = true;
  const auto ab = w2_radial(m, a, b);
  const auto ba = w2_radial(m, b, a);
  CHECK_THAT(ab.value, WithinAbs(2.0, 0.02));  // near point masses two apart
  CHECK_THAT(ab.value - ba.value, WithinAbs(0.0, 1e-12));
  CHECK_THAT(w2_radial(m, a, a).value, WithinAbs(0.0, 1e-12));
  Density c;
  c.form = ParamGaussianDensity{2.0, {0.5}};
  c.normalized = true;
  CHECK(ab.value <= w2_radial(m, a, c).value + w2_radial(m, c, b).value + 1e-9);
}

TEST_CASE("radial and discrete paths agree on a planar instance", "[transport]") {
  const auto m = make_model("gaussian-shrinker:n=2");
  Density d;
  d.form = ParamGaussianDensity{2.0, {}};
  d.normalized = true;
  const auto ref = reference_density(m);
  const int np = 400;
  const double R = 14.0, h = R / np;
  std::vector<double> pts(np), wa(np), wb(np);
  ChartPoint p;
  p.coords = {{0.0, 0.0}};
  for (int i = 0; i < np; ++i) {
    pts[i] = (i + 0.5) * h;
    p.coords[0][0] = pts[i];
    wa[i] = std::exp(log_density(m, d, p)) * pts[i] * h;
    wb[i] = std::exp(log_density(m, ref, p)) * pts[i] * h;
  }
  double ta = 0, tb = 0;
  for (int i = 0; i < np; ++i) ta += wa[i], tb += wb[i];
  for (int i = 0; i < np; ++i) wa[i] /= ta, wb[i] /= tb;
  std::vector<double> cost(np * np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) cost[i * np + j] = detail::sq(pts[i] - pts[j]);
  const double disc = std::sqrt(w2_discrete_exact(cost, wa, wb).cost);
  const double cont = w2_radial(m, d, ref).value;
  CHECK(std::abs(disc - cont) / cont < 0.02);
}

TEST_CASE("sphere distance matches a zonal quantile oracle", "[transport]") {
  const auto m = make_model("sphere:n=2");
  Density d;
  d.form = TiltedReferenceDensity{0.6, "cos"};
  d.normalized = true;  // normalization cancels inside both methods
  const auto ref = reference_density(m);
  const double r = std::sqrt(2.0);
  // zonal oracle: quantile coupling in arclength with weight sin(s/r)
  const int nc = 1 << 15;
  std::vector<double> x(nc + 1), ma(nc), mb(nc);
  for (int i = 0; i <= nc; ++i) x[i] = std::numbers::pi * r * i / nc;
  ChartPoint p;
  p.coords = {{0.0, 0.0}};
  const double off = 0.5 / std::numbers::sqrt3;
  for (int i = 0; i < nc; ++i) {
    const double h = x[i + 1] - x[i], mid = 0.5 * (x[i] + x[i + 1]);
    for (double s : {mid - off * h, mid + off * h}) {
      p.coords[0][0] = s / r;
      ma[i] += std::exp(log_density(m, d, p)) * std::sin(s / r) * h / 2;
      mb[i] += std::exp(log_density(m, ref, p)) * std::sin(s / r) * h / 2;
    }
  }
  const double oracle = std::sqrt(detail::quantile_w2_sq(x, ma, mb));
  const auto disc = w2_sphere_discrete(m, d, ref);
  CHECK(std::abs(disc.value - oracle) / oracle < 0.05);
}

TEST_CASE("entropy-transport-information inequality on the worked instance", "[transport]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto g = build_grid(m, GridResolution{});
  Density d;
  d.form = ParamGaussianDensity{2.0, {}};
  normalize(m, g, d);
  const auto r = hwi_gap(m, g, d);
  CHECK_THAT(r.h_value, WithinAbs(0.5 * (1 - std::log(2.0)), 1e-10));
  CHECK_THAT(r.i_value, WithinAbs(0.25, 1e-10));
  double w2v = 0;
  for (const auto& [k, v] : r.extra)
    if (k == "w2") w2v = v;
  CHECK_THAT(w2v, WithinAbs(std::sqrt(2.0) * (std::sqrt(2.0) - 1), 1e-6));
  CHECK_THAT(r.value, WithinAbs(w2v * 0.5 - 0.25 * w2v * w2v, 1e-12));
  CHECK_THAT(r.gap, WithinAbs(0.207106781187 - 0.153426409720, 1e-5));
  CHECK(r.passed());

  CHECK_THAT(hwi_gap(m, g, reference_density(m)).gap, WithinAbs(0.0, 1e-7));

  // models with more than one curved/flat block have no radial coupling
  const auto cyl = make_model("cylinder:k=3,m=1");
  const auto gc = build_grid(cyl, GridResolution{});
  CHECK(hwi_gap(cyl, gc, reference_density(cyl)).verdict == Verdict::NotApplicable);

  // optimizing the transport bound in W2 recovers the entropy bound I/(2K)
  const double I = 0.25, K = 0.5, wstar = std::sqrt(I) / K;
  CHECK_THAT(wstar * std::sqrt(I) - 0.5 * K * wstar * wstar, WithinAbs(I / (2 * K), 1e-15));
}

TEST_CASE("transport inequality holds through the discrete sphere path", "[transport]") {
  const auto m = make_model("sphere:n=2");
  const auto g = build_grid(m, GridResolution{});
  Density d;
  d.form = ParamGaussianDensity{0.5, {}};
  normalize(m, g, d);
  const auto r = hwi_gap(m, g, d, 1e-3);
  CHECK(r.passed());
}
