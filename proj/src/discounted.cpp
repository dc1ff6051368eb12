#include "laxhopf/discounted.hpp"

#include <fmt/format.h>

#include <cmath>

namespace laxhopf {

AccumulationProfile accumulate_rate(const Trajectory& traj, const RateField& rate) {
  const std::size_t n = traj.n_steps();
  AccumulationProfile prof;
  prof.node_times.resize(n + 1);
  prof.factors.resize(n + 1);
  prof.node_times[n] = traj.node_time(n);
  prof.factors[n] = 1.0;
  double tail = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    tail += traj.dt() * rate(traj.step_midpoint_time(k), traj.step_midpoint_state(k),
                             traj.velocities()[k]);
    const double d = std::exp(tail);
    if (!std::isfinite(d))
      throw RateOverflow(fmt::format("accumulation factor overflows at node {} (t={})", k,
                                     traj.node_time(k)));
    prof.node_times[k] = traj.node_time(k);
    prof.factors[k] = d;
  }
  return prof;
}

ModerationResult discounted_moderate(const CostField& cost, const RateField& rate, double T,
                                     const Vec& x, double omega, const Vec& upsilon,
                                     const SolverConfig& cfg) {
  return moderate_weighted(ModerationProblem{&cost, T, x, omega, upsilon}, &rate, cfg);
}

ValueResult discounted_value(const TerminalCost& terminal, const CostField& cost,
                             const RateField& rate, double T, const Vec& x, const OuterGrid& grid,
                             const SolverConfig& cfg) {
  auto cell = [&](double omega, const Vec& upsilon) {
    detail::Cell c;
    if (omega == 0.0) {
      c.value = c.terminal_part = terminal(T, x);
      return c;
    }
    Vec start(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) start[i] = x[i] - omega * upsilon[i];
    const ExtReal c0 = terminal(T - omega, start);
    if (c0.is_infinite()) return c;
    ModerationResult m = discounted_moderate(cost, rate, T, x, omega, upsilon, cfg);
    if (m.lambda.is_infinite()) return c;
    c.discount = accumulate_rate(*m.argmin, rate).at_start();
    c.terminal_part = c.discount * c0;
    c.lambda = m.lambda;
    c.trajectory = std::move(m.argmin);
    c.value = c.terminal_part + omega * c.lambda;
    return c;
  };
  ValueResult r = detail::outer_search(terminal, T, x, grid, cfg.threads, cell);
  r.rate_model = rate.name;
  if (r.has_optimizer && r.omega_star > 0.0)
    r.certificate_residual = actualized_enrichment_certificate(r, terminal, cost, rate);
  return r;
}

std::optional<double> actualized_enrichment_certificate(const ValueResult& result,
                                                        const TerminalCost& terminal,
                                                        const CostField& cost,
                                                        const RateField& rate) {
  if (!result.has_optimizer || result.omega_star == 0.0) return std::nullopt;
  if (!result.trajectory) throw MisuseError("actualized_enrichment_certificate: no trajectory");
  const Trajectory& tr = *result.trajectory;
  const ExtReal lambda = weighted_cumulated_cost(tr, cost, &rate);
  const ExtReal c0 = terminal(result.T - result.omega_star, result.start_state);
  if (lambda.is_infinite() || c0.is_infinite() || result.value.is_infinite()) return std::nullopt;
  const double d = accumulate_rate(tr, rate).at_start();
  const double actualized = enrichment(d * c0.value(), result.value.value(), result.omega_star);
  return std::abs(lambda.value() - actualized);
}

}  // namespace laxhopf
