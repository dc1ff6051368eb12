#include "laxhopf/economy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace laxhopf {

std::size_t EconomyState::dimension() const {
  if (allocations.size() != prices.size() && prices.size() != 1)
    throw MisuseError("economy: agent count differs between allocations and prices");
  if (allocations.empty()) throw MisuseError("economy: no agents");
  const std::size_t dim = allocations.front().size();
  for (const auto& v : allocations)
    if (v.size() != dim) throw MisuseError("economy: allocation dimension mismatch");
  for (const auto& v : prices)
    if (v.size() != dim) throw MisuseError("economy: price dimension mismatch");
  return dim;
}

namespace {

// Price of agent i; a single price vector is shared by every agent.
const Vec& price_of(const std::vector<Vec>& prices, std::size_t i) {
  return prices.size() == 1 ? prices.front() : prices[i];
}

}  // namespace

double patrimonial_value(const EconomyState& state) {
  state.dimension();
  double u = 0.0;
  for (std::size_t i = 0; i < state.agents(); ++i)
    u += dot(price_of(state.prices, i), state.allocations[i]);
  return u;
}

double impetus(const EconomyState& state, const EconomyVelocity& velocity) {
  state.dimension();
  if (velocity.allocations.size() != state.allocations.size() ||
      velocity.prices.size() != state.prices.size())
    throw MisuseError("impetus: velocity layout differs from the state");
  double e = 0.0;
  for (std::size_t i = 0; i < state.agents(); ++i) {
    e += dot(price_of(state.prices, i), velocity.allocations[i]);
    e += dot(price_of(velocity.prices, i), state.allocations[i]);
  }
  return e;
}

double impact_of_price_fluctuation(VecView price_velocity, VecView commodity) {
  if (price_velocity.size() != commodity.size())
    throw MisuseError("impact_of_price_fluctuation: dimension mismatch");
  return dot(price_velocity, commodity);
}

ExtReal impetus_cost(const ImpetusCostSpec& spec, double t, const EconomyState& state,
                     const EconomyVelocity& velocity) {
  if (spec.agent_bounds.size() != velocity.allocations.size())
    throw MisuseError("impetus_cost: one bound per agent required");
  auto within = [](double v, double bound) { return v <= bound + 1e-12 * std::max(1.0, bound); };
  for (std::size_t i = 0; i < velocity.allocations.size(); ++i)
    if (!within(norm(velocity.allocations[i]), spec.agent_bounds[i].at(t))) return ExtReal::infinity();
  double price_sq = 0.0;
  for (const auto& p : velocity.prices) price_sq += dot(p, p);
  if (!within(std::sqrt(price_sq), spec.price_bound.at(t))) return ExtReal::infinity();
  const double l = spec.scalar_cost(impetus(state, velocity));
  if (std::isnan(l)) throw EvaluationFault("impetus_cost: scalar cost returned NaN");
  return ExtReal(l);
}

Vec EconomyLayout::pack(const EconomyState& s) const {
  if (s.agents() != agents || s.prices.size() != price_count() || s.dimension() != dimension)
    throw MisuseError("EconomyLayout::pack: state does not match the layout");
  Vec z;
  z.reserve(flat_size());
  for (const auto& v : s.allocations) z.insert(z.end(), v.begin(), v.end());
  for (const auto& v : s.prices) z.insert(z.end(), v.begin(), v.end());
  return z;
}

EconomyState EconomyLayout::unpack(VecView z) const {
  if (z.size() != flat_size()) throw MisuseError("EconomyLayout::unpack: size mismatch");
  EconomyState s;
  auto it = z.begin();
  for (std::size_t i = 0; i < agents; ++i, it += static_cast<std::ptrdiff_t>(dimension))
    s.allocations.emplace_back(it, it + static_cast<std::ptrdiff_t>(dimension));
  for (std::size_t i = 0; i < price_count(); ++i, it += static_cast<std::ptrdiff_t>(dimension))
    s.prices.emplace_back(it, it + static_cast<std::ptrdiff_t>(dimension));
  return s;
}

EconomyVelocity EconomyLayout::unpack_velocity(VecView w) const {
  EconomyState s = unpack(w);
  return EconomyVelocity{std::move(s.allocations), std::move(s.prices)};
}

CostField impetus_cost_field(const ImpetusCostSpec& spec, const EconomyLayout& layout) {
  if (spec.agent_bounds.size() != layout.agents)
    throw MisuseError("impetus_cost_field: one bound per agent required");
  CostField f;
  f.dimension = layout.flat_size();
  f.velocity_only = false;
  f.convex_in_u = true;
  f.name = fmt::format("impetus({})", spec.scalar_name);
  for (std::size_t i = 0; i < layout.agents; ++i) {
    const double g = spec.agent_bounds[i].max_value();
    for (std::size_t c = 0; c < layout.dimension; ++c) f.domain_box.push_back(Interval{-g, g});
  }
  const double g0 = spec.price_bound.max_value();
  for (std::size_t i = 0; i < layout.price_count() * layout.dimension; ++i)
    f.domain_box.push_back(Interval{-g0, g0});
  f.evaluator = [spec, layout](double t, VecView z, VecView w) {
    return impetus_cost(spec, t, layout.unpack(z), layout.unpack_velocity(w));
  };
  return f;
}

ValueResult economic_value(const TerminalCost& terminal, const ImpetusCostSpec& spec,
                           const EconomyLayout& layout, double T, const EconomyState& state,
                           const OuterGrid& grid, const SolverConfig& cfg) {
  if (grid.upsilon_lattice.dimension() != layout.flat_size())
    throw MisuseError("economic_value: upsilon lattice must span both allocation and price velocities");
  const CostField cost = impetus_cost_field(spec, layout);
  return generalized_lax_hopf(terminal, cost, T, layout.pack(state), grid, cfg);
}

std::optional<double> economy_enrichment_certificate(const ValueResult& result,
                                                     const TerminalCost& terminal,
                                                     const ImpetusCostSpec& spec,
                                                     const EconomyLayout& layout) {
  if (!result.has_optimizer || result.omega_star == 0.0) return std::nullopt;
  if (!result.trajectory) throw MisuseError("economy_enrichment_certificate: no trajectory");
  const CostField cost = impetus_cost_field(spec, layout);
  const ExtReal total = cumulated_cost(*result.trajectory, cost);
  const ExtReal c0 = terminal(result.T - result.omega_star, result.start_state);
  if (total.is_infinite() || c0.is_infinite() || result.value.is_infinite()) return std::nullopt;
  const double lambda = total.value() / result.omega_star;
  return std::abs(enrichment(c0.value(), result.value.value(), result.omega_star) - lambda);
}

}  // namespace laxhopf
