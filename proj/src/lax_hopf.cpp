#include "laxhopf/lax_hopf.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include "json.hpp"

#include "laxhopf/parallel.hpp"

namespace laxhopf {

OuterGrid OuterGrid::uniform(double omega_max, std::size_t n_omega, const Vec& upsilon_lo,
                             const Vec& upsilon_hi, const Vec& upsilon_step) {
  if (n_omega == 0 || !(omega_max > 0.0)) throw MisuseError("OuterGrid: need omega_max > 0 and n >= 1");
  OuterGrid g;
  for (std::size_t i = 0; i <= n_omega; ++i)
    g.omega_values.push_back(omega_max * static_cast<double>(i) / static_cast<double>(n_omega));
  g.omega_values.back() = omega_max;
  g.upsilon_lattice = Lattice::uniform(upsilon_lo, upsilon_hi, upsilon_step);
  g.omega_max = omega_max;
  return g;
}

namespace detail {

namespace {

// Strict order used by the fold: value, then smaller omega, then smaller
// upsilon lexicographically.
bool better(const Cell& a, const Cell& b) {
  if (a.value < b.value) return true;
  if (b.value < a.value) return false;
  if (a.omega != b.omega) return a.omega < b.omega;
  return std::lexicographical_compare(a.upsilon.begin(), a.upsilon.end(), b.upsilon.begin(),
                                      b.upsilon.end());
}

}  // namespace

ValueResult outer_search(const TerminalCost& terminal, double T, const Vec& x,
                         const OuterGrid& grid, std::size_t threads, const CellFn& cell) {
  if (grid.omega_values.empty() || grid.upsilon_lattice.empty())
    throw MisuseError("outer search: empty grid");
  if (std::find(grid.omega_values.begin(), grid.omega_values.end(), 0.0) == grid.omega_values.end())
    throw MisuseError("outer search: omega grid must contain 0");
  const std::size_t dim = x.size();
  if (grid.upsilon_lattice.dimension() != dim)
    throw MisuseError("outer search: upsilon lattice dimension differs from the state");
  for (double w : grid.omega_values)
    if (!(w >= 0.0)) throw MisuseError("outer search: apertures must be >= 0");

  std::vector<std::pair<double, Vec>> candidates;
  candidates.emplace_back(0.0, Vec(dim, 0.0));
  for (double w : grid.omega_values) {
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < grid.upsilon_lattice.size(); ++i)
      candidates.emplace_back(w, grid.upsilon_lattice.point(i));
  }
  if (grid.use_anchors) {
    for (const auto& a : terminal.anchors) {
      const double w = T - a.t;
      if (!(w > 0.0) || a.y.size() != dim) continue;
      Vec u(dim);
      for (std::size_t i = 0; i < dim; ++i) u[i] = (x[i] - a.y[i]) / w;
      candidates.emplace_back(w, std::move(u));
    }
  }

  std::vector<Cell> cells(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    cells[i] = cell(candidates[i].first, candidates[i].second);
    cells[i].omega = candidates[i].first;
    cells[i].upsilon = candidates[i].second;
  });

  std::size_t evaluated = cells.size();
  Cell best = cells.front();
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (better(cells[i], best)) best = cells[i];

  if (grid.refine && best.value.is_finite()) {
    double omega_cap = grid.omega_max > 0.0
                           ? grid.omega_max
                           : *std::max_element(grid.omega_values.begin(), grid.omega_values.end());
    omega_cap = std::max(omega_cap, best.omega);
    std::vector<double> sorted = grid.omega_values;
    std::sort(sorted.begin(), sorted.end());
    double d_omega = omega_cap;
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] > sorted[i - 1]) d_omega = std::min(d_omega, sorted[i] - sorted[i - 1]);
    Vec steps(dim + 1);
    steps[0] = d_omega;
    for (std::size_t c = 0; c < dim; ++c) steps[c + 1] = grid.upsilon_lattice.axes()[c].step;

    for (std::size_t round = 0; round < grid.rounds; ++round) {
      bool improved = false;
      for (std::size_t coord = 0; coord <= dim; ++coord) {
        for (double sign : {-1.0, 1.0}) {
          double w = best.omega;
          Vec u = best.upsilon;
          if (coord == 0) {
            w = std::clamp(w + sign * steps[0], 0.0, omega_cap);
            if (w == best.omega) continue;
          } else {
            u[coord - 1] += sign * steps[coord];
          }
          Cell probe = cell(w, u);
          probe.omega = w;
          probe.upsilon = std::move(u);
          ++evaluated;
          if (probe.value < best.value) {
            best = std::move(probe);
            improved = true;
          }
        }
      }
      if (!improved)
        for (auto& s : steps) s *= grid.shrink;
    }
  }

  ValueResult r;
  r.T = T;
  r.x = x;
  r.cells_evaluated = evaluated;
  r.value = best.value;
  if (best.value.is_infinite()) return r;
  r.has_optimizer = true;
  r.omega_star = best.omega;
  r.upsilon_star = best.upsilon;
  r.start_state.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) r.start_state[i] = x[i] - best.omega * best.upsilon[i];
  r.moderated_cost = best.lambda;
  r.terminal_part = best.terminal_part;
  r.discount = best.discount;
  r.trajectory = std::move(best.trajectory);
  return r;
}

}  // namespace detail

namespace {

Vec start_of(const Vec& x, double omega, const Vec& upsilon) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - omega * upsilon[i];
  return y;
}

}  // namespace

ValueResult classic_lax_hopf(const TerminalCost& terminal, const CostField& cost, double T,
                             const Vec& x, const OuterGrid& grid, std::size_t n_steps) {
  if (!cost.velocity_only || !cost.convex_in_u)
    throw MisuseError("classic_lax_hopf: requires a velocity-only cost declared convex in u");
  auto cell = [&](double omega, const Vec& upsilon) {
    detail::Cell c;
    if (omega == 0.0) {
      c.value = c.terminal_part = terminal(T, x);
      return c;
    }
    c.terminal_part = terminal(T - omega, start_of(x, omega, upsilon));
    if (c.terminal_part.is_infinite()) return c;
    c.lambda = eval_cost(cost, T, x, upsilon);
    if (c.lambda.is_infinite()) return c;
    c.value = c.terminal_part + omega * c.lambda;
    return c;
  };
  ValueResult r = detail::outer_search(terminal, T, x, grid, 1, cell);
  if (r.has_optimizer && r.omega_star > 0.0) {
    r.trajectory = constant_trajectory(Window(T, r.omega_star), x, r.upsilon_star, n_steps);
    r.certificate_residual = optimum_certificate(r, terminal, r.moderated_cost);
  }
  return r;
}

ValueResult generalized_lax_hopf(const TerminalCost& terminal, const CostField& cost, double T,
                                 const Vec& x, const OuterGrid& grid, const SolverConfig& cfg) {
  auto cell = [&](double omega, const Vec& upsilon) {
    detail::Cell c;
    if (omega == 0.0) {
      c.value = c.terminal_part = terminal(T, x);
      return c;
    }
    c.terminal_part = terminal(T - omega, start_of(x, omega, upsilon));
    if (c.terminal_part.is_infinite()) return c;
    ModerationResult m = moderate(ModerationProblem{&cost, T, x, omega, upsilon}, cfg);
    if (m.lambda.is_infinite()) return c;
    c.lambda = m.lambda;
    c.trajectory = std::move(m.argmin);
    c.value = c.terminal_part + omega * c.lambda;
    return c;
  };
  ValueResult r = detail::outer_search(terminal, T, x, grid, cfg.threads, cell);
  if (r.has_optimizer && r.omega_star > 0.0)
    r.certificate_residual = optimum_certificate(r, terminal, r.moderated_cost);
  return r;
}

std::optional<double> optimum_certificate(const ValueResult& result, const TerminalCost& terminal,
                                          ExtReal moderation_lambda) {
  if (!result.has_optimizer || result.omega_star == 0.0) return std::nullopt;
  const ExtReal c = terminal(result.T - result.omega_star, result.start_state);
  if (c.is_infinite() || result.value.is_infinite() || moderation_lambda.is_infinite())
    return std::nullopt;
  return std::abs(enrichment(c.value(), result.value.value(), result.omega_star) -
                  moderation_lambda.value());
}

std::vector<ProfilePoint> dynamic_value_profile(const ValueResult& result,
                                                const TerminalCost& terminal,
                                                const CostField& cost) {
  if (!result.has_optimizer || result.omega_star == 0.0 || !result.trajectory)
    throw MisuseError("dynamic_value_profile: needs an optimizer with positive aperture");
  const Trajectory& tr = *result.trajectory;
  const ExtReal c0 = terminal(tr.window().start(), result.start_state);
  if (c0.is_infinite()) throw MisuseError("dynamic_value_profile: infinite start cost");
  std::vector<ProfilePoint> out;
  out.reserve(tr.n_steps() + 1);
  double running = c0.value();
  out.push_back({tr.node_time(0), running});
  for (std::size_t k = 0; k < tr.n_steps(); ++k) {
    const ExtReal l = eval_cost(cost, tr.step_midpoint_time(k), tr.step_midpoint_state(k),
                                tr.velocities()[k]);
    if (l.is_infinite()) throw MisuseError("dynamic_value_profile: infinite step cost");
    running += tr.dt() * l.value();
    out.push_back({tr.node_time(k + 1), running});
  }
  return out;
}

ExtReal wtp_value(const TerminalCost& terminal, double velocity_bound, double T, const Vec& x,
                  double omega, const std::vector<Vec>& state_grid) {
  if (!(omega >= 0.0)) throw DomainError("wtp_value: aperture must be >= 0");
  if (!(velocity_bound >= 0.0)) throw DomainError("wtp_value: velocity bound must be >= 0");
  if (omega == 0.0) return terminal(T, x);
  const double radius = omega * velocity_bound;
  ExtReal best = ExtReal::infinity();
  Vec d(x.size());
  for (const auto& y : state_grid) {
    if (y.size() != x.size()) throw MisuseError("wtp_value: grid dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
    if (norm(d) > radius * (1.0 + 1e-12) + 1e-15) continue;
    best = min(best, terminal(T - omega, y));
  }
  return best;
}

void write_value_json(std::ostream& os, const ValueResult& result) {
  using nlohmann::ordered_json;
  auto ext = [](ExtReal v) -> ordered_json {
    if (v.is_infinite()) return "inf";
    return v.value();
  };
  ordered_json j;
  j["value"] = ext(result.value);
  if (result.has_optimizer) {
    j["omega_star"] = result.omega_star;
    j["upsilon_star"] = result.upsilon_star;
    j["start_state"] = result.start_state;
  } else {
    j["omega_star"] = nullptr;
    j["upsilon_star"] = nullptr;
    j["start_state"] = nullptr;
  }
  if (result.certificate_residual)
    j["certificate_residual"] = *result.certificate_residual;
  else
    j["certificate_residual"] = nullptr;
  if (!result.rate_model.empty()) j["rate_model"] = result.rate_model;
  os << j.dump(2) << '\n';
}

}  // namespace laxhopf
