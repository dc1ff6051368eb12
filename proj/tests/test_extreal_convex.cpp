#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "laxhopf/convex.hpp"

using namespace laxhopf;

TEST_CASE("extended reals absorb infinity and refuse NaN") {
  const ExtReal inf = ExtReal::infinity();
  CHECK((ExtReal(1.5) + ExtReal(2.0)).value() == 3.5);
  CHECK((ExtReal(1.0) + inf).is_infinite());
  CHECK(min(ExtReal(3.0), inf).value() == 3.0);
  CHECK(max(ExtReal(-1e300), inf).is_infinite());
  CHECK(ExtReal(1e308) < inf);
  CHECK(inf == inf);
  CHECK_THROWS_AS(ExtReal(std::nan("")), EvaluationFault);
  CHECK_THROWS_AS(ExtReal(-std::numeric_limits<double>::infinity()), EvaluationFault);
  CHECK_THROWS_AS(0.0 * inf, EvaluationFault);
  CHECK_THROWS_AS(-2.0 * inf, EvaluationFault);
  CHECK((2.0 * inf).is_infinite());
  CHECK_THROWS_AS(inf.value(), MisuseError);
  CHECK(to_string(inf) == "inf");
  CHECK(ExtReal(std::numeric_limits<double>::infinity()).is_infinite());
}

TEST_CASE("total order: infinity is the absorbing maximum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const ExtReal a(d(rng)), b(d(rng));
    CHECK((a + ExtReal::infinity()) == ExtReal::infinity());
    CHECK(min(a, b) <= max(a, b));
    CHECK(((a + b) == (b + a)));
  }
}

TEST_CASE("cost evaluation") {
  const CostField q = costs::quadratic();
  CHECK(eval_cost(q, 0.0, Vec{0.0}, Vec{2.0}).value() == doctest::Approx(2.0));
  const CostField boxed = costs::with_box(q, Box{{-1.0, 1.0}});
  CHECK(eval_cost(boxed, 0.0, Vec{0.0}, Vec{2.0}).is_infinite());
  const CostField tq = costs::weighted_quadratic(1.0, 1.0);
  CHECK(eval_cost(tq, 1.0, Vec{0.0}, Vec{1.0}).value() == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_cost(q, 0.0, Vec{0.0, 1.0}, Vec{1.0, 2.0}), MisuseError);

  CostField bad;
  bad.evaluator = [](double, VecView, VecView) { return ExtReal(0.0) + ExtReal(std::nan("")); };
  CHECK_THROWS_AS(eval_cost(bad, 0.0, Vec{0.0}, Vec{0.0}), EvaluationFault);
}

TEST_CASE("velocity-only costs ignore time and state") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (const CostField& c : {costs::quadratic(), costs::abs(), costs::double_well()}) {
    REQUIRE(c.velocity_only);
    for (int i = 0; i < 50; ++i) {
      const Vec u{d(rng)};
      CHECK(eval_cost(c, d(rng), Vec{d(rng)}, u) == eval_cost(c, d(rng), Vec{d(rng)}, u));
    }
  }
}

TEST_CASE("Legendre-Fenchel transform on a lattice") {
  const Lattice fine = Lattice::uniform({-10.0}, {10.0}, {0.01});
  CHECK(legendre_fenchel(costs::quadratic(), 0.0, Vec{0.0}, Vec{3.0}, fine).value() ==
        doctest::Approx(4.5).epsilon(0.01 / 4.5));
  const Lattice coarse = Lattice::uniform({-5.0}, {5.0}, {0.1});
  CHECK(std::abs(legendre_fenchel(costs::abs(), 0.0, Vec{0.0}, Vec{0.5}, coarse).value()) <= 1e-9);
  for (double p : {-7.0, 0.0, 2.5})
    CHECK(legendre_fenchel(costs::indicator_zero(), 0.0, Vec{0.0}, Vec{p}, coarse).value() == 0.0);
  const CostField nowhere = costs::with_box(costs::quadratic(), Box{{20.0, 30.0}});
  CHECK_THROWS_AS(legendre_fenchel(nowhere, 0.0, Vec{0.0}, Vec{1.0}, coarse), EmptyDomain);
}

TEST_CASE("conjugate table: convexity, Fenchel-Young, biconjugation") {
  const Lattice vel = Lattice::uniform({-4.0}, {4.0}, {0.05});
  const Lattice dual = Lattice::uniform({-3.0}, {3.0}, {0.1});
  for (const CostField& c : {costs::quadratic(), costs::abs(), costs::double_well()}) {
    const ConjugateTable table = build_conjugate_table(c, 0.0, Vec{0.0}, dual, vel);
    CHECK(table.is_midpoint_convex(1e-9));
    CHECK(fenchel_young_margin(c, table, vel) >= -1e-9);
  }
  // l** recovers a convex l on the interior and convexifies a double well.
  const ConjugateTable q = build_conjugate_table(costs::quadratic(), 0.0, Vec{0.0}, dual, vel);
  CHECK(q.biconjugate(Vec{1.0}) == doctest::Approx(0.5).epsilon(1e-2));
  const ConjugateTable w = build_conjugate_table(costs::double_well(), 0.0, Vec{0.0}, dual, vel);
  CHECK(std::abs(w.biconjugate(Vec{0.0})) < 1e-2);
  CHECK(eval_cost(costs::double_well(), 0.0, Vec{0.0}, Vec{0.0}).value() == 1.0);
}

TEST_CASE("subdifferential membership") {
  const Lattice g = Lattice::uniform({-10.0}, {10.0}, {0.01});
  CHECK(subdifferential_check(costs::quadratic(), 0.0, Vec{0.0}, Vec{2.0}, Vec{2.0}, g, 1e-6));
  CHECK_FALSE(subdifferential_check(costs::quadratic(), 0.0, Vec{0.0}, Vec{2.0}, Vec{1.0}, g, 1e-6));
  CHECK(subdifferential_check(costs::abs(), 0.0, Vec{0.0}, Vec{0.0}, Vec{0.7}, g, 1e-9));
}

TEST_CASE("Marchaud checks") {
  const double K = 1.0;
  const CostField trunc = costs::with_box(costs::truncated_quadratic(K), Box{{-1.0, 1.0}});
  SampleRegion region{-1.0, 1.0, 1.0, 1};
  CHECK(check_marchaud(trunc, K + 2.0, region, 200, 1).consistent());

  const MarchaudReport unbounded = check_marchaud(costs::weighted_quadratic(2.0, 0.0), 5.0, region, 50, 1);
  CHECK(unbounded.count(MarchaudViolation::Kind::DomainGrowth) > 0);

  const MarchaudReport negative = check_marchaud(costs::constant(-1.0), 5.0, region, 50, 1);
  CHECK(negative.count(MarchaudViolation::Kind::Negative) > 0);
}
