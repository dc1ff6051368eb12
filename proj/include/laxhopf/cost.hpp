#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "laxhopf/extreal.hpp"
#include "laxhopf/vec.hpp"

namespace laxhopf {

using CostFn = std::function<ExtReal(double t, VecView x, VecView u)>;
using TerminalFn = std::function<ExtReal(double t, VecView x)>;

/// Transaction cost l(t, x, u) with the metadata the solvers rely on.
///
/// `velocity_only` and `convex_in_u` are declarations; they are trusted by
/// the solvers and only sample-checked by the verification tools.
struct CostField {
  CostFn evaluator;
  std::size_t dimension = 1;
  bool velocity_only = false;
  bool convex_in_u = false;
  Box domain_box;  // empty means unbounded in every coordinate
  std::string name;
};

/// Evaluates l(t, x, u). Returns +inf outside the domain box and throws
/// EvaluationFault naming (t, x, u) if the evaluator yields NaN.
ExtReal eval_cost(const CostField& cost, double t, VecView x, VecView u);

/// A point (t, y) at which a terminal cost is known to be finite. Costs that
/// are finite on a single point (indicators) publish it so the outer search
/// can aim at it directly.
struct Anchor {
  double t = 0.0;
  Vec y;
};

/// Instantaneous cost c(t, x) charged at the start of the window.
struct TerminalCost {
  TerminalFn evaluator;
  std::vector<Anchor> anchors;
  std::string name;

  ExtReal operator()(double t, VecView x) const;
  // Departure tube membership: x in C(t) iff c(t, x) < inf.
  bool in_departure_tube(double t, VecView x) const { return (*this)(t, x).is_finite(); }
};

// Catalog. Names resolve in configuration files; see README for the list.
namespace costs {

CostField quadratic(std::size_t dim = 1);                              // |u|^2 / 2
CostField abs(std::size_t dim = 1);                                    // sum_i |u_i|
CostField weighted_quadratic(double a0, double a1, std::size_t dim = 1);  // (a0 + a1 t)|u|^2/2
CostField indicator_zero(std::size_t dim = 1);                         // 0 at u = 0
CostField double_well(std::size_t dim = 1);                            // min(|u-1|^2, |u+1|^2)
CostField truncated_quadratic(double cap, std::size_t dim = 1);        // min(|u|^2, cap)
CostField constant(double value, std::size_t dim = 1);

// Returns a copy of `cost` that is +inf outside `box`.
CostField with_box(CostField cost, Box box);

// Resolves a catalog name with its numeric parameters.
std::optional<CostField> by_name(const std::string& name, const std::vector<double>& params,
                                 std::size_t dim);

}  // namespace costs

namespace terminals {

TerminalCost indicator_point(double t0, Vec y0, double tol = 1e-12);
TerminalCost squared_norm();  // |y|^2, independent of t
TerminalCost zero();

std::optional<TerminalCost> by_name(const std::string& name, const std::vector<double>& params,
                                    std::size_t dim);

}  // namespace terminals

}  // namespace laxhopf
