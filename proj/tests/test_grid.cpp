// Quadrature grids: product Gauss panels reproduce areas, masses, and
// moments to near machine accuracy; symmetric integrands cancel; the flat
// cutoff covers covariance scales in [1/8, 8].
#include <catch2/catch_amalgamated.hpp>
#include <soliton_entropy/catalog.hpp>
#include <soliton_entropy/grid.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace soliton_entropy;
using Catch::Matchers::WithinAbs;

namespace {

// integrate fn(node) against the grid measure
template <typename F>
double integrate_fn(const QuadratureGrid& g, F fn) {
  std::vector<double> v(g.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g.nodes[i]);
  return integrate(g, v);
}

}  // namespace

TEST_CASE("sphere grid reproduces the surface area", "[grid]") {
  const auto m = make_model("sphere:n=2");
  const auto g = build_grid(m, {.radial = 256});
  REQUIRE(!g.nodes.empty());
  const double area = integrate_fn(g, [](const ChartPoint&) { return 1.0; });
  CHECK_THAT(area, WithinAbs(8.0 * std::numbers::pi, 1e-10));
}

TEST_CASE("flat grids integrate the reference measure and its moments", "[grid]") {
  const double pi = std::numbers::pi;
  {
    const auto m = make_model("gaussian-shrinker:n=2");
    const auto g = build_grid(m, {.radial = 256});
    const double mass = integrate_fn(g, [&](const ChartPoint& p) {
      return std::exp(-potential(m, p)) / (4 * pi);
    });
    const double fmom = integrate_fn(g, [&](const ChartPoint& p) {
      return potential(m, p) * std::exp(-potential(m, p)) / (4 * pi);
    });
    const double x2 = integrate_fn(g, [&](const ChartPoint& p) {
      const double r = p.coords[0][0];
      return r * r * std::exp(-potential(m, p)) / (4 * pi);
    });
    CHECK_THAT(mass, WithinAbs(1.0, 1e-10));
    CHECK_THAT(fmom, WithinAbs(1.0, 1e-9));  // E f = n/2
    CHECK_THAT(x2, WithinAbs(4.0, 1e-9));    // E |x|^2 = 2n
  }
  {
    const auto m = make_model("gaussian-shrinker:n=3");
    const auto g = build_grid(m, {.radial = 256});
    const double x2 = integrate_fn(g, [&](const ChartPoint& p) {
      const double r = p.coords[0][0];
      return r * r * std::exp(-potential(m, p)) / std::pow(4 * pi, 1.5);
    });
    CHECK_THAT(x2, WithinAbs(6.0, 1e-9));
  }
}

TEST_CASE("reference measures have unit mass on curved and tilted grids", "[grid]") {
  const double pi = std::numbers::pi;
  {
    const auto m = make_model("cigar");
    const auto g = build_grid(m, {.radial = 256});
    const double mass =
        integrate_fn(g, [&](const ChartPoint& p) { return std::exp(-potential(m, p)); });
    CHECK_THAT(mass, WithinAbs(1.0, 1e-10));
  }
  {
    const auto m = make_model("gaussian-shrinker:n=2,tilt=1");
    const auto g = build_grid(m, {.radial = 256});
    const double mass = integrate_fn(g, [&](const ChartPoint& p) {
      return std::exp(-potential(m, p)) / (4 * pi);
    });
    CHECK_THAT(mass, WithinAbs(1.0, 1e-10));
  }
  {
    const auto m = make_model("cylinder:k=2,m=2");
    const auto g = build_grid(m, {.radial = 256});
    const double mass = integrate_fn(g, [&](const ChartPoint& p) {
      return std::exp(-potential(m, p)) / std::pow(4 * pi, 2.0);
    });
    CHECK_THAT(mass, WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("odd integrands cancel on the symmetric flat grid", "[grid]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto g = build_grid(m, {.radial = 256});
  const double pi = std::numbers::pi;
  const double v = integrate_fn(g, [&](const ChartPoint& p) {
    const double x = p.coords[0][0];
    return x * std::exp(-x * x / 4) / std::sqrt(4 * pi);
  });
  CHECK_THAT(v, WithinAbs(0.0, 1e-12));
}

TEST_CASE("integrals are stable under doubling the cutoff", "[grid]") {
  const auto m = make_model("cylinder:k=3,m=1");
  double vals[2];
  int i = 0;
  for (double mult : {1.0, 2.0}) {
    GridResolution res{.radial = 256};
    res.cutoff = 27.0 * mult;
    const auto g = build_grid(m, res);
    vals[i++] = integrate_fn(g, [&](const ChartPoint& p) {
      return grad_potential_normsq(m, p) * std::exp(-potential(m, p));
    });
  }
  CHECK_THAT(vals[1] - vals[0], WithinAbs(0.0, 1e-10));
}

TEST_CASE("default cutoff holds unit mass across the seeded scale range", "[grid]") {
  const auto m = make_model("gaussian-shrinker:n=3");
  const auto g = build_grid(m, {.radial = 256});
  const double pi = std::numbers::pi;
  for (double s : {0.125, 8.0}) {
    INFO("scale " << s);
    const double mass = integrate_fn(g, [&](const ChartPoint& p) {
      const double r = p.coords[0][0];
      return std::exp(-r * r / (4 * s)) / std::pow(4 * pi * s, 1.5);
    });
    CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("grid carries its resolution and a positive flat cutoff", "[grid]") {
  const auto m = make_model("gaussian-shrinker:n=2");
  const auto g = build_grid(m, {.radial = 128});
  CHECK(g.cutoff > 0.0);
  CHECK(g.nodes.size() == g.weights.size());
  CHECK(g.model_id == m.id);
}
