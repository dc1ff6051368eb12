#pragma once

#include <vector>

#include "laxhopf/lax_hopf.hpp"
#include "laxhopf/rate.hpp"

namespace laxhopf {

/// Accumulation factors D_k = exp(integral_{t_k}^T m) per trajectory node,
/// midpoint quadrature of m on each step. D_N = 1.
struct AccumulationProfile {
  std::vector<double> node_times;
  std::vector<double> factors;

  double at_start() const { return factors.front(); }
};

/// Throws RateOverflow naming the node if a factor overflows.
AccumulationProfile accumulate_rate(const Trajectory& traj, const RateField& rate);

/// Moderation with the integrand actualized to T along the candidate itself.
ModerationResult discounted_moderate(const CostField& cost, const RateField& rate, double T,
                                     const Vec& x, double omega, const Vec& upsilon,
                                     const SolverConfig& cfg);

/// inf over cells of D(T - omega) c(T - omega, x - omega upsilon) + omega Lambda_(l,m),
/// D taken along the cell's own discounted-moderation argmin.
ValueResult discounted_value(const TerminalCost& terminal, const CostField& cost,
                             const RateField& rate, double T, const Vec& x, const OuterGrid& grid,
                             const SolverConfig& cfg);

/// |Lambda_(l,m)(omega*, upsilon*) - (value - D(T - omega*) c(T - omega*, start)) / omega*|.
/// Recomputes Lambda and D from the stored optimal trajectory.
std::optional<double> actualized_enrichment_certificate(const ValueResult& result,
                                                        const TerminalCost& terminal,
                                                        const CostField& cost,
                                                        const RateField& rate);

}  // namespace laxhopf
