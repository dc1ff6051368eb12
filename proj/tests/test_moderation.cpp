#include <doctest.h>

#include <cmath>
#include <sstream>

#include "laxhopf/moderation.hpp"

using namespace laxhopf;

namespace {
const double kTimeDependent = 1.0 / (2.0 * std::log(2.0));

ModerationResult run(const CostField& c, double T, Vec x, double omega, Vec ups, SolverConfig cfg = {}) {
  return moderate(ModerationProblem{&c, T, std::move(x), omega, std::move(ups)}, cfg);
}
}  // namespace

TEST_CASE("convex velocity-only cost coincides with its moderation") {
  const CostField q = costs::quadratic();
  const ModerationResult r = run(q, 3.0, Vec{0.7}, 1.0, Vec{2.0});
  CHECK(r.lambda.value() == doctest::Approx(2.0).epsilon(1e-6));
  for (const auto& u : r.argmin->velocities()) CHECK(u[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(jensen_gap(q, 1.0, Vec{0.0}, 1.0, Vec{3.0}, {})) <= 1e-6);
  CHECK(std::abs(jensen_gap(costs::abs(), 1.0, Vec{0.0}, 2.0, Vec{-1.0}, {})) <= 1e-6);
  CHECK(jensen_gap(q, 1.0, Vec{0.0}, 1.0, Vec{0.0}, {}) == 0.0);
  CHECK_THROWS_AS(jensen_gap(costs::weighted_quadratic(1, 1), 1.0, Vec{0.0}, 1.0, Vec{1.0}, {}), MisuseError);
}

TEST_CASE("time-dependent cost follows the Euler-Lagrange profile") {
  SolverConfig cfg;
  cfg.n_steps = 64;
  const ModerationResult r = run(costs::weighted_quadratic(1.0, 1.0), 1.0, Vec{1.0}, 1.0, Vec{1.0}, cfg);
  CHECK(std::abs(r.lambda.value() - kTimeDependent) <= 1e-3);
  // u(t) (1 + t) is constant along the optimum.
  const Trajectory& tr = *r.argmin;
  const double first = tr.velocities().front()[0] * (1.0 + tr.step_midpoint_time(0));
  const double last = tr.velocities().back()[0] * (1.0 + tr.step_midpoint_time(tr.n_steps() - 1));
  CHECK(first == doctest::Approx(last).epsilon(1e-3));
}

TEST_CASE("zero transaction at zero cost") {
  const ModerationResult r = run(costs::weighted_quadratic(1.0, 1.0), 1.0, Vec{0.2}, 0.5, Vec{0.0});
  CHECK(r.lambda.value() == 0.0);
  for (const auto& u : r.argmin->velocities()) CHECK(u[0] == 0.0);
}

TEST_CASE("constraint is met exactly and infeasibility is +inf") {
  const CostField boxed = costs::with_box(costs::double_well(), Box{{-1.5, 1.5}});
  const ModerationResult r = run(boxed, 1.0, Vec{0.0}, 1.3, Vec{0.4});
  REQUIRE(r.argmin);
  CHECK(std::abs(average_transaction(*r.argmin)[0] - 0.4) <= 1e-12);
  const ModerationResult out = run(boxed, 1.0, Vec{0.0}, 1.0, Vec{2.0});
  CHECK(out.lambda.is_infinite());
  CHECK_FALSE(out.argmin.has_value());
}

TEST_CASE("non-convex cost is undercut by velocity mixing") {
  const ModerationResult r = run(costs::double_well(), 1.0, Vec{0.0}, 1.0, Vec{0.0});
  CHECK(r.lambda.value() < 1e-6);
}

TEST_CASE("solver never beats a hand-built feasible trajectory by more than noise") {
  const CostField c = costs::weighted_quadratic(1.0, 1.0);
  const Trajectory hand = constant_trajectory(Window(1.0, 1.0), Vec{1.0}, Vec{1.0}, 32);
  const double hand_cost = cumulated_cost(hand, c).value();
  CHECK(run(c, 1.0, Vec{1.0}, 1.0, Vec{1.0}).lambda.value() <= hand_cost + 1e-9);
}

TEST_CASE("velocity-only moderation does not depend on the base point") {
  const CostField w = costs::double_well();
  const double a = run(w, 1.0, Vec{0.0}, 1.0, Vec{0.3}).lambda.value();
  const double b = run(w, 4.0, Vec{-2.0}, 1.0, Vec{0.3}).lambda.value();
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("moderation table") {
  const CostField q = costs::quadratic();
  const Lattice ups = Lattice::uniform({-1.0}, {1.0}, {1.0});
  const ModerationTable t = build_moderation_table(q, 1.0, Vec{0.0}, {0.5, 1.0, 2.0}, ups, {});
  REQUIRE(t.values.size() == 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double u = ups.point(j)[0];
      CHECK(t.at(i, j).value() == doctest::Approx(0.5 * u * u).epsilon(1e-6));
      const ExtReal again = cumulated_cost(*t.argmins[i * 3 + j], q);
      CHECK(std::abs(again.value() / t.omega_grid[i] - t.at(i, j).value()) <= 1e-12);
    }

  const CostField boxed = costs::with_box(q, Box{{-1.0, 1.0}});
  const ModerationTable b =
      build_moderation_table(boxed, 1.0, Vec{0.0}, {1.0}, Lattice::uniform({2.0}, {2.0}, {1.0}), {});
  CHECK(b.values.front().is_infinite());

  const CostField tq = costs::weighted_quadratic(1.0, 1.0);
  const ModerationTable single =
      build_moderation_table(tq, 1.0, Vec{1.0}, {1.0}, Lattice::uniform({1.0}, {1.0}, {1.0}), {});
  CHECK(single.values.front() == run(tq, 1.0, Vec{1.0}, 1.0, Vec{1.0}).lambda);

  std::ostringstream os;
  write_moderation_csv(os, b);
  CHECK(os.str() == "omega,upsilon_1,lambda\n1,2,inf\n");
}

TEST_CASE("fixed seed reproduces bit-identical results, regardless of threads") {
  SolverConfig cfg;
  cfg.seed = 42;
  const CostField w = costs::double_well();
  const Lattice ups = Lattice::uniform({-0.5}, {0.5}, {0.5});
  const ModerationTable a = build_moderation_table(w, 1.0, Vec{0.0}, {0.5, 1.0}, ups, cfg);
  cfg.threads = 3;
  const ModerationTable b = build_moderation_table(w, 1.0, Vec{0.0}, {0.5, 1.0}, ups, cfg);
  CHECK(a.values == b.values);
}
