#include <doctest.h>

#include <cmath>
#include <sstream>

#include "laxhopf/verify.hpp"

using namespace laxhopf;

namespace {
DPGrids grids(double dt, double state_step, double vstep, double vlo = -2.0, double vhi = 2.0) {
  DPGrids g;
  g.t0 = 0.0;
  g.T = 1.0;
  g.n_time = static_cast<std::size_t>(std::lround(1.0 / dt));
  g.state_lo = {-0.5};
  g.state_hi = {1.5};
  g.state_step = {state_step};
  g.velocity_lo = {vlo};
  g.velocity_hi = {vhi};
  g.velocity_step = {vstep};
  return g;
}

ExtReal final_value(const ValueSurface& s, double x) { return s.at_point(s.times().size() - 1, Vec{x}); }
}  // namespace

TEST_CASE("DP oracle on closed-form benchmarks") {
  // Velocity step 0.1 times dt 0.02 needs a state step dividing 0.002.
  const DPGrids g = grids(0.02, 0.002, 0.1);
  const ValueSurface quad = dp_oracle(terminals::squared_norm(), costs::weighted_quadratic(2.0, 0.0), g);
  CHECK(std::abs(final_value(quad, 1.0).value() - 0.5) <= 0.02);
  const ValueSurface ind = dp_oracle(terminals::indicator_point(0.0, {0.0}), costs::quadratic(), g);
  CHECK(std::abs(final_value(ind, 1.0).value() - 0.5) <= 0.02);
  const ValueSurface free = dp_oracle(terminals::squared_norm(), costs::constant(0.0), grids(0.02, 0.002, 0.1, 0.0, 2.0));
  CHECK(final_value(free, 1.0).value() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("DP oracle rejects incommensurate grids before computing") {
  CHECK_THROWS_AS(dp_oracle(terminals::squared_norm(), costs::quadratic(), grids(0.02, 0.02, 0.1)), ConfigError);
  CHECK_THROWS_AS(dp_oracle(terminals::squared_norm(), costs::quadratic(), grids(0.02, 0.002, 0.1, -2.05)),
                  ConfigError);
}

TEST_CASE("surface stays below the obstacle and is monotone in the data") {
  const DPGrids g = grids(0.05, 0.005, 0.1);
  const TerminalCost sq = terminals::squared_norm();
  const ValueSurface s = dp_oracle(sq, costs::quadratic(), g);
  const ValueSurface higher = dp_oracle(sq, costs::weighted_quadratic(2.0, 0.0), g);
  Vec y(1);
  for (std::size_t n = 0; n < s.times().size(); ++n)
    for (std::size_t i = 0; i < s.states().size(); ++i) {
      s.states().point(i, y);
      CHECK(s.at(n, i) <= sq(s.times()[n], y));
      CHECK(higher.at(n, i) >= s.at(n, i));
    }

  std::ostringstream os;
  write_surface_csv(os, dp_oracle(sq, costs::quadratic(), grids(0.5, 0.5, 1.0)));
  CHECK(os.str().rfind("t,x_1,W\n0,-0.5,0.25\n", 0) == 0);
}

TEST_CASE("HJ residual") {
  const Lattice vel = Lattice::uniform({-5.0}, {5.0}, {0.01});
  const CostField q = costs::quadratic();
  SurfaceFn hopf = [](double t, VecView y) { return ExtReal(y[0] * y[0] / (2.0 * t)); };
  CHECK(std::abs(*hj_residual(hopf, q, 1.0, Vec{1.0}, 1e-3, vel)) <= 1e-4);
  SurfaceFn flat = [](double, VecView) { return ExtReal(3.0); };
  CHECK(*hj_residual(flat, q, 1.0, Vec{0.3}, 1e-3, vel) == doctest::Approx(0.0));
  SurfaceFn linear = [](double, VecView y) { return ExtReal(0.8 * y[0]); };
  CHECK(*hj_residual(linear, q, 1.0, Vec{0.3}, 1e-3, vel) == doctest::Approx(0.32).epsilon(1e-4));
  SurfaceFn wall = [](double t, VecView) { return t > 1.0 ? ExtReal::infinity() : ExtReal(0.0); };
  CHECK_FALSE(hj_residual(wall, q, 1.0, Vec{0.0}, 1e-3, vel).has_value());

  const ValueSurface s = dp_oracle(terminals::squared_norm(), q, grids(0.1, 0.05, 0.5));
  CHECK_THROWS_AS(hj_residual(s, q, 0, 5, vel), MisuseError);
  CHECK(hj_residual(s, q, 5, 20, vel).has_value());
}

TEST_CASE("Jensen suites") {
  JensenSampleSpec spec;
  spec.seed = 4;
  const JensenReport q = jensen_suite(costs::quadratic(), spec);
  CHECK(q.samples.size() == 20);
  CHECK(q.max_abs_gap <= 1e-6);
  CHECK(q.passed());
  CHECK(jensen_suite(costs::abs(), spec).max_abs_gap <= 1e-6);

  const JensenReport w = jensen_suite(costs::double_well(), spec);
  CHECK(w.expected_nonconvex);
  CHECK(w.passed());
  CHECK(moderation_gap(costs::double_well(), 1.0, {0.0}, 1.0, {0.0}, {}) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS_AS(jensen_suite(costs::weighted_quadratic(1, 1), spec), MisuseError);
}

TEST_CASE("convergence studies") {
  ConvergenceScenario quad{terminals::squared_norm(), costs::weighted_quadratic(2.0, 0.0), 1.0, {1.0},
                           OuterGrid::uniform(1.0, 10, {-2.0}, {2.0}, {0.25}), {}, 0.5};
  std::vector<ConvergenceLevel> levels;
  for (auto [dt, vs] : {std::pair{0.1, 0.3}, {0.05, 0.15}, {0.02, 0.06}}) {
    DPGrids g = grids(dt, vs * dt, vs, -1.8, 1.8);
    levels.push_back({g.n_time, g});
  }
  const auto rows = convergence_study(quad, levels);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].error < rows[0].error);
  CHECK(rows[2].error < rows[1].error);
  CHECK(final_levels_nonincreasing(rows));

  // Velocity 1 reaches the target exactly on every lattice: both paths agree.
  ConvergenceScenario exact{terminals::indicator_point(0.0, {0.0}), costs::quadratic(), 1.0, {1.0},
                            OuterGrid::uniform(1.0, 10, {-2.0}, {2.0}, {0.25}), {}, 0.5};
  std::vector<ConvergenceLevel> lattice_levels{{10, grids(0.1, 0.01, 0.1)}, {20, grids(0.05, 0.005, 0.1)}};
  for (const auto& r : convergence_study(exact, lattice_levels)) CHECK(r.error <= 1e-12);

  CHECK_THROWS_AS(convergence_study(quad, {levels.front()}), MisuseError);
  std::ostringstream os;
  write_convergence_csv(os, rows);
  CHECK(os.str().rfind("dt,formula,oracle,error\n0.1,", 0) == 0);
}
