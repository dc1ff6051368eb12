#pragma once

#include <functional>
#include <vector>

#include "laxhopf/lax_hopf.hpp"

namespace laxhopf {

/// n agents holding commodity vectors x_i with prices p_i, all in R^l.
struct EconomyState {
  std::vector<Vec> allocations;
  std::vector<Vec> prices;

  std::size_t agents() const noexcept { return allocations.size(); }
  // Throws MisuseError unless counts and dimensions agree.
  std::size_t dimension() const;
};

/// Time derivatives of an EconomyState, same layout.
struct EconomyVelocity {
  std::vector<Vec> allocations;
  std::vector<Vec> prices;
};

/// sum_i <p_i, x_i>
double patrimonial_value(const EconomyState& state);

/// sum_i (<p_i, x_i'> + <p_i', x_i>), the time derivative of the patrimonial value.
double impetus(const EconomyState& state, const EconomyVelocity& velocity);

/// <p', x>
double impact_of_price_fluctuation(VecView price_velocity, VecView commodity);

struct ImpetusCostSpec {
  std::function<double(double)> scalar_cost;  // convex, nonnegative
  std::string scalar_name;
  VelocityBound price_bound;                  // gamma_0 on |p'|
  std::vector<VelocityBound> agent_bounds;    // gamma_i on |x_i'|
  bool shared_price = false;                  // one price vector for all agents
};

/// l(E) when every velocity bound holds at t, +inf otherwise.
ExtReal impetus_cost(const ImpetusCostSpec& spec, double t, const EconomyState& state,
                     const EconomyVelocity& velocity);

/// Packing of (x, p) into the flat state used by the Lax-Hopf solvers:
/// x_1..x_n then p_1..p_n (or a single p when prices are shared).
struct EconomyLayout {
  std::size_t agents = 1;
  std::size_t dimension = 1;
  bool shared_price = false;

  std::size_t price_count() const noexcept { return shared_price ? 1 : agents; }
  std::size_t flat_size() const noexcept { return (agents + price_count()) * dimension; }
  Vec pack(const EconomyState& s) const;
  EconomyState unpack(VecView z) const;
  EconomyVelocity unpack_velocity(VecView w) const;
};

/// The impetus cost as a CostField over the flat (x, p) state.
CostField impetus_cost_field(const ImpetusCostSpec& spec, const EconomyLayout& layout);

/// W(T, x, p) through the generalized formula on the doubled state, with
/// c + omega * Lambda in the outer minimization.
ValueResult economic_value(const TerminalCost& terminal, const ImpetusCostSpec& spec,
                           const EconomyLayout& layout, double T, const EconomyState& state,
                           const OuterGrid& grid, const SolverConfig& cfg);

/// |(W(T) - c(T - omega*, start)) / omega* - Lambda(omega*, upsilon_x*, upsilon_p*)|,
/// with Lambda recomputed from the optimal trajectory.
std::optional<double> economy_enrichment_certificate(const ValueResult& result,
                                                     const TerminalCost& terminal,
                                                     const ImpetusCostSpec& spec,
                                                     const EconomyLayout& layout);

}  // namespace laxhopf
