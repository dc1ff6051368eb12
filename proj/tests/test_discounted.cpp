#include <doctest.h>

#include <cmath>

#include "laxhopf/discounted.hpp"

using namespace laxhopf;

namespace {
OuterGrid unit_grid() { return OuterGrid::uniform(1.0, 10, {-2.0}, {2.0}, {0.25}); }
}  // namespace

TEST_CASE("accumulation factors") {
  const Trajectory tr = constant_trajectory(Window(1.0, 1.0), Vec{1.0}, Vec{0.7}, 16);
  for (double d : accumulate_rate(tr, rates::zero()).factors) CHECK(d == 1.0);
  const AccumulationProfile c = accumulate_rate(tr, rates::constant(0.1));
  CHECK(c.factors.back() == 1.0);
  CHECK(c.at_start() == doctest::Approx(std::exp(0.1)).epsilon(1e-6));
  CHECK(accumulate_rate(tr, rates::velocity(1.0)).at_start() == doctest::Approx(std::exp(0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(accumulate_rate(tr, rates::constant(1e4)), RateOverflow);
}

TEST_CASE("discounted moderation") {
  SolverConfig cfg;
  cfg.seed = 9;
  const CostField q = costs::quadratic();
  const ModerationResult plain = moderate(ModerationProblem{&q, 1.0, {1.0}, 1.0, {1.0}}, cfg);
  const ModerationResult zero = discounted_moderate(q, rates::zero(), 1.0, {1.0}, 1.0, {1.0}, cfg);
  CHECK(plain.lambda == zero.lambda);
  CHECK(plain.iterations == zero.iterations);
  CHECK(plain.argmin->velocities() == zero.argmin->velocities());

  const double bound = 0.5 * (std::exp(0.5) - 1.0) / 0.5;
  const ModerationResult r = discounted_moderate(q, rates::constant(0.5), 1.0, {1.0}, 1.0, {1.0}, cfg);
  CHECK(r.lambda.value() <= bound + 1e-6);

  const CostField boxed = costs::with_box(q, Box{{-1.0, 1.0}});
  CHECK(discounted_moderate(boxed, rates::constant(0.5), 1.0, {1.0}, 1.0, {3.0}, cfg).lambda.is_infinite());
}

TEST_CASE("zero rate reproduces the undiscounted value") {
  const CostField c = costs::weighted_quadratic(1.0, 1.0);
  const TerminalCost sq = terminals::squared_norm();
  const ValueResult a = generalized_lax_hopf(sq, c, 1.0, {1.0}, unit_grid(), {});
  const ValueResult b = discounted_value(sq, c, rates::zero(), 1.0, {1.0}, unit_grid(), {});
  CHECK(a.value == b.value);
  CHECK(a.omega_star == b.omega_star);
  CHECK(a.upsilon_star == b.upsilon_star);
  CHECK(*a.certificate_residual == *b.certificate_residual);
  CHECK(b.rate_model == "zero");
}

TEST_CASE("value grows with the rate") {
  const CostField c = costs::weighted_quadratic(2.0, 0.0);
  const TerminalCost sq = terminals::squared_norm();
  ExtReal prev(0.0);
  for (double r : {0.0, 0.1, 0.5}) {
    const ValueResult v = discounted_value(sq, c, rates::constant(r), 1.0, {1.0}, unit_grid(), {});
    CHECK(v.value >= prev - 1e-9);
    prev = v.value;
  }
}

TEST_CASE("indicator benchmark under a constant rate") {
  const TerminalCost origin = terminals::indicator_point(0.0, {0.0});
  const CostField q = costs::quadratic();
  const ValueResult zero = discounted_value(origin, q, rates::zero(), 1.0, {1.0}, unit_grid(), {});
  CHECK(zero.value.value() == doctest::Approx(0.5).epsilon(1e-9));
  const RateField rate = rates::constant(0.3);
  const ValueResult r = discounted_value(origin, q, rate, 1.0, {1.0}, unit_grid(), {});
  const ExtReal weighted = weighted_cumulated_cost(*r.trajectory, q, nullptr);
  CHECK(r.value.value() ==
        doctest::Approx(r.omega_star * weighted_cumulated_cost(*r.trajectory, q, &rate).value()).epsilon(1e-12));
  CHECK(weighted.value() >= 0.5 - 1e-9);
}

TEST_CASE("actualized certificate") {
  const CostField q = costs::weighted_quadratic(2.0, 0.0);
  const TerminalCost sq = terminals::squared_norm();
  const ValueResult z = discounted_value(sq, q, rates::zero(), 1.0, {1.0}, unit_grid(), {});
  CHECK(*actualized_enrichment_certificate(z, sq, q, rates::zero()) ==
        *optimum_certificate(z, sq, z.moderated_cost));
  const ValueResult r = discounted_value(sq, q, rates::constant(0.1), 1.0, {1.0}, unit_grid(), {});
  CHECK(*actualized_enrichment_certificate(r, sq, q, rates::constant(0.1)) <= 1e-4);

  const ValueResult flat = discounted_value(terminals::indicator_point(0.0, {0.0}), costs::constant(0.0),
                                            rates::constant(0.2), 1.0, {0.0}, unit_grid(), {});
  if (flat.omega_star > 0.0)
    CHECK(*actualized_enrichment_certificate(flat, terminals::indicator_point(0.0, {0.0}), costs::constant(0.0),
                                             rates::constant(0.2)) == 0.0);
  else
    CHECK_FALSE(flat.certificate_residual.has_value());
}
