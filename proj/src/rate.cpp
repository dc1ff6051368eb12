#include "laxhopf/rate.hpp"

#include <fmt/format.h>

#include <cmath>

#include "laxhopf/errors.hpp"

namespace laxhopf {

double RateField::operator()(double t, VecView x, VecView u) const {
  const double m = evaluator(t, x, u);
  if (std::isnan(m)) throw EvaluationFault(fmt::format("rate '{}' returned NaN at t={}", name, t));
  return m;
}

namespace rates {

RateField zero() { return RateField{[](double, VecView, VecView) { return 0.0; }, true, "zero"}; }

RateField constant(double r) {
  return RateField{[r](double, VecView, VecView) { return r; }, true, fmt::format("constant({})", r)};
}

RateField time_linear(double a, double b) {
  return RateField{[a, b](double t, VecView, VecView) { return a + b * t; }, true,
                   fmt::format("time_linear({},{})", a, b)};
}

RateField velocity(double k) {
  return RateField{[k](double, VecView, VecView u) {
                     double s = 0.0;
                     for (double v : u) s += v;
                     return k * s;
                   },
                   false, fmt::format("velocity({})", k)};
}

std::optional<RateField> by_name(const std::string& name, const std::vector<double>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw MisuseError(fmt::format("rate '{}' takes {} parameter(s), got {}", name, n,
                                    params.size()));
  };
  if (name == "zero") return need(0), zero();
  if (name == "constant") return need(1), constant(params[0]);
  if (name == "time_linear") return need(2), time_linear(params[0], params[1]);
  if (name == "velocity") return need(1), velocity(params[0]);
  return std::nullopt;
}

}  // namespace rates

}  // namespace laxhopf
