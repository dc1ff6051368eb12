#include "laxhopf/cost.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>

namespace laxhopf {

ExtReal eval_cost(const CostField& cost, double t, VecView x, VecView u) {
  if (u.size() != cost.dimension)
    throw MisuseError(fmt::format("eval_cost: velocity has dimension {}, cost expects {}", u.size(),
                                  cost.dimension));
  if (!box_contains(cost.domain_box, u)) return ExtReal::infinity();
  try {
    return cost.evaluator(t, x, u);
  } catch (const EvaluationFault& e) {
    throw EvaluationFault(fmt::format("cost '{}' faulted at t={} x=[{}] u=[{}]: {}", cost.name, t,
                                      fmt::join(x, ","), fmt::join(u, ","), e.what()));
  }
}

ExtReal TerminalCost::operator()(double t, VecView x) const {
  try {
    return evaluator(t, x);
  } catch (const EvaluationFault& e) {
    throw EvaluationFault(fmt::format("terminal cost '{}' faulted at t={} x=[{}]: {}", name, t,
                                      fmt::join(x, ","), e.what()));
  }
}

namespace costs {

namespace {

double squared(VecView u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s;
}

}  // namespace

CostField quadratic(std::size_t dim) {
  return CostField{[](double, VecView, VecView u) { return ExtReal(0.5 * squared(u)); }, dim, true,
                   true, {}, "quadratic"};
}

CostField abs(std::size_t dim) {
  return CostField{[](double, VecView, VecView u) {
                     double s = 0.0;
                     for (double v : u) s += std::abs(v);
                     return ExtReal(s);
                   },
                   dim, true, true, {}, "abs"};
}

CostField weighted_quadratic(double a0, double a1, std::size_t dim) {
  return CostField{[a0, a1](double t, VecView, VecView u) {
                     return ExtReal((a0 + a1 * t) * 0.5 * squared(u));
                   },
                   dim, a1 == 0.0, a0 >= 0.0 && a1 == 0.0, {},
                   fmt::format("weighted_quadratic({},{})", a0, a1)};
}

CostField indicator_zero(std::size_t dim) {
  return CostField{[](double, VecView, VecView u) {
                     for (double v : u)
                       if (v != 0.0) return ExtReal::infinity();
                     return ExtReal(0.0);
                   },
                   dim, true, true, {}, "indicator_zero"};
}

CostField double_well(std::size_t dim) {
  return CostField{[](double, VecView, VecView u) {
                     double a = 0.0, b = 0.0;
                     for (double v : u) {
                       a += (v - 1.0) * (v - 1.0);
                       b += (v + 1.0) * (v + 1.0);
                     }
                     return ExtReal(std::min(a, b));
                   },
                   dim, true, false, {}, "double_well"};
}

CostField truncated_quadratic(double cap, std::size_t dim) {
  return CostField{[cap](double, VecView, VecView u) { return ExtReal(std::min(squared(u), cap)); },
                   dim, true, false, {}, fmt::format("truncated_quadratic({})", cap)};
}

CostField constant(double value, std::size_t dim) {
  return CostField{[value](double, VecView, VecView) { return ExtReal(value); }, dim, true, true,
                   {}, fmt::format("constant({})", value)};
}

CostField with_box(CostField cost, Box box) {
  if (!box.empty() && box.size() != cost.dimension)
    throw MisuseError("with_box: box dimension does not match the cost");
  cost.domain_box = std::move(box);
  return cost;
}

std::optional<CostField> by_name(const std::string& name, const std::vector<double>& params,
                                 std::size_t dim) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw MisuseError(fmt::format("cost '{}' takes {} parameter(s), got {}", name, n,
                                    params.size()));
  };
  if (name == "quadratic") return need(0), quadratic(dim);
  if (name == "abs") return need(0), abs(dim);
  if (name == "weighted_quadratic") return need(2), weighted_quadratic(params[0], params[1], dim);
  if (name == "indicator_zero") return need(0), indicator_zero(dim);
  if (name == "double_well") return need(0), double_well(dim);
  if (name == "truncated_quadratic") return need(1), truncated_quadratic(params[0], dim);
  if (name == "constant") return need(1), constant(params[0], dim);
  return std::nullopt;
}

}  // namespace costs

namespace terminals {

TerminalCost indicator_point(double t0, Vec y0, double tol) {
  TerminalCost c;
  c.evaluator = [t0, y0, tol](double t, VecView y) {
    if (std::abs(t - t0) > tol) return ExtReal::infinity();
    if (y.size() != y0.size()) throw MisuseError("indicator_point: dimension mismatch");
    for (std::size_t i = 0; i < y.size(); ++i)
      if (std::abs(y[i] - y0[i]) > tol * std::max(1.0, std::abs(y0[i]))) return ExtReal::infinity();
    return ExtReal(0.0);
  };
  c.anchors.push_back(Anchor{t0, y0});
  c.name = "indicator_point";
  return c;
}

TerminalCost squared_norm() {
  TerminalCost c;
  c.evaluator = [](double, VecView y) {
    double s = 0.0;
    for (double v : y) s += v * v;
    return ExtReal(s);
  };
  c.name = "squared_norm";
  return c;
}

TerminalCost zero() {
  TerminalCost c;
  c.evaluator = [](double, VecView) { return ExtReal(0.0); };
  c.name = "zero";
  return c;
}

std::optional<TerminalCost> by_name(const std::string& name, const std::vector<double>& params,
                                    std::size_t dim) {
  if (name == "indicator_point") {
    // params: t0 then y0 (defaults to the origin)
    if (params.empty()) return indicator_point(0.0, Vec(dim, 0.0));
    if (params.size() == 1) return indicator_point(params[0], Vec(dim, 0.0));
    if (params.size() != dim + 1)
      throw MisuseError(fmt::format("indicator_point takes 1 or {} parameters", dim + 1));
    return indicator_point(params[0], Vec(params.begin() + 1, params.end()));
  }
  if (name == "squared_norm") return squared_norm();
  if (name == "zero") return zero();
  return std::nullopt;
}

}  // namespace terminals

}  // namespace laxhopf
