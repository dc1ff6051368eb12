#pragma once

#include <functional>
#include <optional>
#include <string>

#include "laxhopf/vec.hpp"

namespace laxhopf {

using RateFn = std::function<double(double t, VecView x, VecView u)>;

/// Interest rate m(t, x, u) per unit time. `state_free` marks rates that do
/// not depend on (x, u), which lets the solvers skip their derivatives.
struct RateField {
  RateFn evaluator;
  bool state_free = false;
  std::string name;

  double operator()(double t, VecView x, VecView u) const;
};

namespace rates {

RateField zero();
RateField constant(double r);
RateField time_linear(double a, double b);  // a + b t
RateField velocity(double k);               // k * sum_i u_i

std::optional<RateField> by_name(const std::string& name, const std::vector<double>& params);

}  // namespace rates

}  // namespace laxhopf
