// Model catalog: closed-form invariants, pointwise soliton identities,
// geodesic distances, and id parsing.
#include <catch2/catch_amalgamated.hpp>
#include <soliton_entropy/catalog.hpp>

#include <cmath>
#include <numbers>

using namespace soliton_entropy;
using Catch::Matchers::WithinAbs;

TEST_CASE("catalog ids round-trip through make_model", "[catalog]") {
  const auto ids = catalog_ids();
  REQUIRE(ids.size() == 12);
  for (const auto& id : ids) {
    const SolitonModel m = make_model(id);
    INFO(id);
    CHECK(m.id == id);
    CHECK(m.total_dim >= 1);
    CHECK(m.tau > 0.0);
    CHECK(!m.factors.empty());
  }
}

TEST_CASE("catalog covers all three soliton kinds", "[catalog]") {
  CHECK(make_model("gaussian-shrinker:n=2").kind == SolitonKind::Shrinking);
  CHECK(make_model("cigar").kind == SolitonKind::Steady);
  CHECK(make_model("gaussian-expander:n=2").kind == SolitonKind::Expanding);
  CHECK(to_string(SolitonKind::Shrinking) == "shrinking");
  CHECK(to_string(SolitonKind::Steady) == "steady");
  CHECK(to_string(SolitonKind::Expanding) == "expanding");
}

TEST_CASE("pointwise identities hold on every catalog model", "[catalog]") {
  for (const auto& id : catalog_ids()) {
    const SolitonModel m = make_model(id);
    INFO(id);
    CHECK(soliton_residual(m, sample_points(m, 64)) <= 1e-10);
  }
}

TEST_CASE("invariants match their closed forms", "[catalog]") {
  const double pi = std::numbers::pi;
  // flat shrinkers and expanders normalize to zero
  CHECK_THAT(mu_invariant(make_model("gaussian-shrinker:n=1")), WithinAbs(0.0, 1e-12));
  CHECK_THAT(mu_invariant(make_model("gaussian-shrinker:n=4")), WithinAbs(0.0, 1e-12));
  CHECK_THAT(mu_invariant(make_model("gaussian-expander:n=2")), WithinAbs(0.0, 1e-12));
  CHECK_THAT(mu_invariant(make_model("gaussian-expander:n=3")), WithinAbs(0.0, 1e-12));
  // even spheres: mu = n/2 - log(area(S^n(r)) / (4 pi)^{n/2}), r^2 = 2(n-1)
  CHECK_THAT(mu_invariant(make_model("sphere:n=2")), WithinAbs(1.0 - std::log(2.0), 1e-10));
  CHECK_THAT(mu_invariant(make_model("sphere:n=4")), WithinAbs(2.0 - std::log(6.0), 1e-10));
  // a flat factor contributes nothing: cylinder keeps the sphere value
  CHECK_THAT(mu_invariant(make_model("cylinder:k=2,m=2")),
             WithinAbs(1.0 - std::log(2.0), 1e-10));
  CHECK_THAT(mu_invariant(make_model("cylinder:k=3,m=1")),
             WithinAbs(1.5 - std::log(2.0) - 0.5 * std::log(pi), 1e-10));
  CHECK_THAT(mu_invariant(make_model("cigar")), WithinAbs(4.0, 1e-12));
  CHECK_THAT(mu_invariant(make_model("einstein-expander-product:k=2,m=2,vol=8pi")),
             WithinAbs(-1.0 - std::log(2.0), 1e-10));
}

TEST_CASE("axial tilts do not change the flat-shrinker invariant", "[catalog]") {
  for (const char* id : {"gaussian-shrinker:n=1,tilt=1", "gaussian-shrinker:n=2,tilt=0.7",
                         "gaussian-shrinker:n=3,tilt=2"}) {
    INFO(id);
    CHECK_THAT(mu_invariant(make_model(id)), WithinAbs(0.0, 1e-10));
  }
}

TEST_CASE("tau parameter rescales the model but keeps the invariant", "[catalog]") {
  const SolitonModel m = make_model("sphere:n=2,tau=2");
  CHECK(m.tau == 2.0);
  CHECK_THAT(mu_invariant(m), WithinAbs(1.0 - std::log(2.0), 1e-10));
  CHECK_THAT(mu_invariant(make_model("cylinder:k=2,m=2,tau=0.5")),
             WithinAbs(1.0 - std::log(2.0), 1e-10));
}

TEST_CASE("curvature-dimension lower bounds", "[catalog]") {
  // shrinkers carry K = 1/(2 tau); the Gaussian expander carries K = 1/2
  CHECK_THAT(cd_lower_bound(make_model("gaussian-shrinker:n=2")), WithinAbs(0.5, 1e-12));
  CHECK_THAT(cd_lower_bound(make_model("sphere:n=2")), WithinAbs(0.5, 1e-12));
  CHECK_THAT(cd_lower_bound(make_model("sphere:n=2,tau=2")), WithinAbs(0.25, 1e-12));
  CHECK_THAT(cd_lower_bound(make_model("gaussian-expander:n=3")), WithinAbs(0.5, 1e-12));
}

TEST_CASE("mis-scaled factors are rejected by the residual", "[catalog]") {
  // sphere radius slightly off the shrinker normalization
  const SolitonModel bad = assemble_model(
      SolitonKind::Shrinking, {RoundSphere{2, std::sqrt(2.1)}, FlatGaussian{2, {}, 0.25}},
      1.0, "bad");
  CHECK(soliton_residual(bad, sample_points(bad, 100)) > 1e-2);
  CHECK_THROWS_AS(mu_invariant(bad), inconsistent_model_error);
}

TEST_CASE("geodesic distances match closed forms", "[catalog]") {
  const SolitonModel sph = make_model("sphere:n=2");
  ChartPoint a = base_point(sph), b = base_point(sph);
  b.coords[0][0] = std::numbers::pi;  // antipode on S^2(sqrt 2)
  CHECK_THAT(geodesic_distance(sph, a, b), WithinAbs(std::numbers::pi * std::sqrt(2.0), 1e-12));

  const SolitonModel cig = make_model("cigar");
  ChartPoint c0 = base_point(cig), c1 = base_point(cig);
  c1.coords[0][0] = std::exp(1.0);  // arclength from origin is asinh(x)
  CHECK_THAT(geodesic_distance(cig, c0, c1), WithinAbs(std::asinh(std::exp(1.0)), 1e-12));
}

TEST_CASE("unknown and malformed ids throw", "[catalog]") {
  CHECK_THROWS_AS(make_model("nope"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("sphere:n=1"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("gaussian-shrinker:n=0"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("sphere:n=2,tau=-1"), std::invalid_argument);
}
