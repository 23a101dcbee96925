// Drift-diffusion flow: reference fixed point, closed-form Gaussian
// solution, entropy/Fisher dissipation identities, decay envelopes,
// refinement order, and solver guards.
#include <catch2/catch_amalgamated.hpp>
#include <soliton_entropy/catalog.hpp>
#include <soliton_entropy/density.hpp>
#include <soliton_entropy/flow.hpp>

#include <cmath>
#include <memory>
#include <sstream>

using namespace soliton_entropy;
using Catch::Matchers::WithinAbs;

TEST_CASE("the reference density is a fixed point of one step", "[flow]") {
  CHECK(flow_fixed_point_check(make_model("gaussian-shrinker:n=1"), 512).passed());
  CHECK(flow_fixed_point_check(make_model("sphere:n=2"), 512).passed());
}

TEST_CASE("Gaussian initial data follows the closed-form variance path", "[flow]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto r = flow_closed_form_check(m, 2.0, 1.0, 2e-4, 512);
  double h_err = 1, drift = 1;
  for (const auto& [k, v] : r.extra) {
    if (k == "h_max_err") h_err = v;
    if (k == "mass_drift") drift = v;
  }
  CHECK(r.value <= 1e-4);  // L1 distance to the exact solution
  CHECK(h_err <= 1e-4);
  CHECK(drift <= 1e-13);
  CHECK(r.passed());
}

TEST_CASE("widening Gaussian trace dissipates entropy at the Fisher rate", "[flow]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, 512, 2.0));
  Density init;
  init.form = ParamGaussianDensity{2.0, {}};
  const FlowTrace tr = run_flow(m, make_flow_state(m, grid, init), 3.0, 1e-3);
  REQUIRE(tr.samples.size() >= 10);
  CHECK_THAT(tr.decay_rate, WithinAbs(0.5, 1e-15));
  CHECK(dissipation_check(tr).passed());
  CHECK(fisher_dissipation_check(m, tr, true).passed());
  CHECK(decay_check(tr, tr.decay_rate).passed());

  // H and I track the exact variance path s(t) = 1 + e^{-t}
  double worst_h = 0, worst_i = 0;
  for (const auto& s : tr.samples) {
    const double sv = 1.0 + std::exp(-s.t);
    worst_h = std::max(worst_h, std::abs(s.entropy - 0.5 * (sv - 1.0 - std::log(sv))));
    worst_i = std::max(worst_i, std::abs(s.fisher - (sv - 1.0) * (sv - 1.0) / (2.0 * sv)));
  }
  CHECK(worst_h <= 1e-4);
  CHECK(worst_i <= 2e-3);
}

TEST_CASE("narrowing Gaussian trace satisfies both dissipation identities", "[flow]") {
  const auto m = make_model("gaussian-shrinker:n=2");
  const auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, 512));
  Density init;
  init.form = ParamGaussianDensity{0.5, {}};
  const FlowTrace tr = run_flow(m, make_flow_state(m, grid, init), 2.0, 5e-4);
  CHECK(fisher_dissipation_check(m, tr, false).passed());
  CHECK(dissipation_check(tr).passed());
}

TEST_CASE("halving the mesh shrinks the closed-form error superlinearly", "[flow]") {
  const auto r = flow_order_check(make_model("gaussian-shrinker:n=1"), 2.0, 1.0, 2e-4, 512);
  CHECK(r.value >= 3.5);  // coarse/fine error ratio, ~4 for a second-order scheme
  CHECK(r.passed());
}

TEST_CASE("a trace started at the reference stays at the quadrature floor", "[flow]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, 256));
  const FlowTrace tr = run_flow(m, make_flow_state(m, grid, reference_density(m)), 0.5, 1e-3);
  double hmax = 0, imax = 0;
  for (const auto& s : tr.samples) {
    hmax = std::max(hmax, std::abs(s.entropy));
    imax = std::max(imax, std::abs(s.fisher));
  }
  CHECK(hmax <= 1e-12);
  CHECK(imax <= 1e-12);
  CHECK(decay_check(tr, 0.5).passed());
  CHECK(fisher_dissipation_check(m, tr, true).verdict != Verdict::Fail);
}

TEST_CASE("sphere bump relaxes monotonically within the decay envelope", "[flow]") {
  const auto m = make_model("sphere:n=2");
  const auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, 512));
  const FlowTrace tr = run_flow(m, make_flow_state_cos_bump(grid, 0.5), 2.0, 1e-3);
  for (std::size_t k = 1; k < tr.samples.size(); ++k)
    CHECK(tr.samples[k].entropy < tr.samples[k - 1].entropy);
  CHECK(decay_check(tr, tr.decay_rate).passed());
  CHECK(dissipation_check(tr).passed());
  // no closed form off the flat factor, but Fisher information stays monotone
  CHECK(fisher_dissipation_check(m, tr, true).verdict == Verdict::NotApplicable);
}

TEST_CASE("solver guards reject unstable steps and wrong charts", "[flow]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, 128));
  CHECK(grid->dt_bound > 0.0);
  FlowState st = make_flow_state(m, grid, reference_density(m));
  CHECK_THROWS_AS(step_flow(st, grid->dt_bound * 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_flow_state_cos_bump(grid, 0.5), std::invalid_argument);
}

TEST_CASE("trace serialization starts with the column header", "[flow]") {
  const auto m = make_model("gaussian-shrinker:n=1");
  const auto grid = std::make_shared<const FlowGrid>(build_flow_grid(m, 128));
  const FlowTrace tr = run_flow(m, make_flow_state(m, grid, reference_density(m)), 0.05, 1e-3);
  std::ostringstream os;
  write_trace_csv(tr, os);
  CHECK(os.str().rfind("t,H,I,mass,min_density\n", 0) == 0);
}
