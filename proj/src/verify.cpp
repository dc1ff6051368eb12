#include "laxhopf/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "laxhopf/convex.hpp"
#include "laxhopf/parallel.hpp"

namespace laxhopf {

ValueSurface::ValueSurface(std::vector<double> times, Lattice states)
    : times_(std::move(times)), states_(std::move(states)) {
  values_.assign(times_.size() * states_.size(), ExtReal::infinity());
}

ExtReal& ValueSurface::at(std::size_t time_idx, std::size_t state_idx) {
  return values_.at(time_idx * states_.size() + state_idx);
}

const ExtReal& ValueSurface::at(std::size_t time_idx, std::size_t state_idx) const {
  return values_.at(time_idx * states_.size() + state_idx);
}

std::optional<std::size_t> ValueSurface::node_index(VecView y) const {
  if (y.size() != states_.dimension()) throw MisuseError("ValueSurface: dimension mismatch");
  std::size_t flat = 0;
  for (std::size_t c = 0; c < y.size(); ++c) {
    const auto& a = states_.axes()[c];
    const double k = std::round((y[c] - a.lo) / a.step);
    if (k < 0.0 || k >= static_cast<double>(a.count)) return std::nullopt;
    if (std::abs(a.at(static_cast<std::size_t>(k)) - y[c]) > 1e-9 * a.step) return std::nullopt;
    flat = flat * a.count + static_cast<std::size_t>(k);
  }
  return flat;
}

ExtReal ValueSurface::at_point(std::size_t time_idx, VecView y) const {
  const auto idx = node_index(y);
  if (!idx) throw MisuseError("ValueSurface::at_point: point outside the state lattice");
  return at(time_idx, *idx);
}

namespace {

struct CheckedGrids {
  Lattice states;
  std::vector<long> vel_lo, vel_hi;  // velocity = index * velocity_step
  std::vector<long> shift;          // state-index shift per velocity index unit
};

long integral(double v, const std::string& what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
    throw ConfigError(what, fmt::format("{} is not an integer multiple", v));
  return static_cast<long>(r);
}

CheckedGrids check_grids(const DPGrids& g, std::size_t dim) {
  auto sized = [&](const Vec& v, const char* name) {
    if (v.size() != dim) throw ConfigError(fmt::format("dp.{}", name), "dimension mismatch");
  };
  sized(g.state_lo, "state_lo");
  sized(g.state_hi, "state_hi");
  sized(g.state_step, "state_step");
  sized(g.velocity_lo, "velocity_lo");
  sized(g.velocity_hi, "velocity_hi");
  sized(g.velocity_step, "velocity_step");
  if (g.n_time == 0 || !(g.T > g.t0)) throw ConfigError("dp.n_time", "need T > t0 and n_time >= 1");
  CheckedGrids out;
  std::vector<Lattice::Axis> axes;
  const double dt = g.dt();
  for (std::size_t c = 0; c < dim; ++c) {
    if (!(g.state_step[c] > 0.0) || !(g.velocity_step[c] > 0.0))
      throw ConfigError("dp.state_step", "steps must be positive");
    axes.push_back(Lattice::make_axis(g.state_lo[c], g.state_hi[c], g.state_step[c]));
    out.vel_lo.push_back(integral(g.velocity_lo[c] / g.velocity_step[c], "dp.velocity_lo"));
    out.vel_hi.push_back(integral(g.velocity_hi[c] / g.velocity_step[c], "dp.velocity_hi"));
    if (out.vel_hi.back() < out.vel_lo.back()) throw ConfigError("dp.velocity_hi", "empty velocity range");
    // velocity_step * dt must land on the state lattice.
    out.shift.push_back(integral(g.velocity_step[c] * dt / g.state_step[c], "dp.velocity_step"));
    if (out.shift.back() == 0) throw ConfigError("dp.velocity_step", "velocity step * dt is below the state step");
  }
  out.states = Lattice(std::move(axes));
  return out;
}

}  // namespace

ValueSurface dp_oracle(const TerminalCost& terminal, const CostField& cost, const DPGrids& grids) {
  const std::size_t dim = cost.dimension;
  const CheckedGrids cg = check_grids(grids, dim);
  const double dt = grids.dt();
  std::vector<double> times(grids.n_time + 1);
  for (std::size_t n = 0; n <= grids.n_time; ++n) times[n] = grids.t0 + static_cast<double>(n) * dt;
  times.back() = grids.T;

  ValueSurface surf(times, cg.states);
  const Lattice& states = surf.states();
  const std::size_t ns = states.size();

  std::vector<std::size_t> strides(dim, 1);
  for (std::size_t c = dim; c-- > 1;) strides[c - 1] = strides[c] * states.axes()[c].count;

  // Velocity multi-indices, flattened.
  std::vector<std::vector<long>> velocity_indices{{}};
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<std::vector<long>> next;
    for (const auto& prefix : velocity_indices)
      for (long m = cg.vel_lo[c]; m <= cg.vel_hi[c]; ++m) {
        auto v = prefix;
        v.push_back(m);
        next.push_back(std::move(v));
      }
    velocity_indices = std::move(next);
  }

  Vec y(dim);
  for (std::size_t i = 0; i < ns; ++i) {
    states.point(i, y);
    surf.at(0, i) = terminal(times[0], y);
  }

  for (std::size_t n = 1; n <= grids.n_time; ++n) {
    const double t = times[n];
    const double t_mid = t - 0.5 * dt;
    parallel_for(ns, 1, [&](std::size_t i) {
      Vec yi(dim), yp(dim), mid(dim), u(dim);
      states.point(i, yi);
      ExtReal best = terminal(t, yi);
      std::vector<std::size_t> idx(dim);
      std::size_t rem = i;
      for (std::size_t c = 0; c < dim; ++c) {
        idx[c] = rem / strides[c];
        rem %= strides[c];
      }
      for (const auto& m : velocity_indices) {
        std::size_t pred = 0;
        bool inside = true;
        for (std::size_t c = 0; c < dim && inside; ++c) {
          const long p = static_cast<long>(idx[c]) - m[c] * cg.shift[c];
          if (p < 0 || p >= static_cast<long>(states.axes()[c].count)) inside = false;
          pred += static_cast<std::size_t>(p) * strides[c];
        }
        if (!inside) continue;
        const ExtReal prev = surf.at(n - 1, pred);
        if (prev.is_infinite() || !(prev < best)) continue;
        states.point(pred, yp);
        for (std::size_t c = 0; c < dim; ++c) {
          u[c] = static_cast<double>(m[c]) * grids.velocity_step[c];
          mid[c] = 0.5 * (yi[c] + yp[c]);
        }
        const ExtReal l = eval_cost(cost, t_mid, mid, u);
        if (l.is_infinite()) continue;
        best = min(best, prev + dt * l);
      }
      surf.at(n, i) = best;
    });
  }
  return surf;
}

void write_surface_csv(std::ostream& os, const ValueSurface& surface) {
  const std::size_t dim = surface.states().dimension();
  os << 't';
  for (std::size_t c = 1; c <= dim; ++c) os << ",x_" << c;
  os << ",W\n";
  Vec y(dim);
  for (std::size_t n = 0; n < surface.times().size(); ++n)
    for (std::size_t i = 0; i < surface.states().size(); ++i) {
      surface.states().point(i, y);
      os << format_real(surface.times()[n]);
      for (double v : y) os << ',' << format_real(v);
      os << ',' << to_string(surface.at(n, i)) << '\n';
    }
}

std::optional<double> hj_residual(const SurfaceFn& surface, const CostField& cost, double t,
                                  VecView y, double h, const Lattice& velocity_grid) {
  if (!(h > 0.0)) throw MisuseError("hj_residual: stencil step must be positive");
  const ExtReal tp = surface(t + h, y), tm = surface(t - h, y);
  if (tp.is_infinite() || tm.is_infinite()) return std::nullopt;
  const double v_t = (tp.value() - tm.value()) / (2.0 * h);
  Vec p(y.size()), probe(y.begin(), y.end());
  for (std::size_t c = 0; c < y.size(); ++c) {
    probe[c] = y[c] + h;
    const ExtReal xp = surface(t, probe);
    probe[c] = y[c] - h;
    const ExtReal xm = surface(t, probe);
    probe[c] = y[c];
    if (xp.is_infinite() || xm.is_infinite()) return std::nullopt;
    p[c] = (xp.value() - xm.value()) / (2.0 * h);
  }
  return v_t + legendre_fenchel(cost, t, y, p, velocity_grid).value();
}

std::optional<double> hj_residual(const ValueSurface& surface, const CostField& cost,
                                  std::size_t time_idx, std::size_t state_idx,
                                  const Lattice& velocity_grid) {
  const auto& times = surface.times();
  const Lattice& states = surface.states();
  if (time_idx == 0 || time_idx + 1 >= times.size())
    throw MisuseError("hj_residual: node must be interior in time");
  const std::size_t dim = states.dimension();
  std::vector<std::size_t> strides(dim, 1);
  for (std::size_t c = dim; c-- > 1;) strides[c - 1] = strides[c] * states.axes()[c].count;
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t k = (state_idx / strides[c]) % states.axes()[c].count;
    if (k == 0 || k + 1 >= states.axes()[c].count)
      throw MisuseError("hj_residual: node must be interior in state");
  }
  const ExtReal tp = surface.at(time_idx + 1, state_idx), tm = surface.at(time_idx - 1, state_idx);
  if (tp.is_infinite() || tm.is_infinite()) return std::nullopt;
  const double v_t = (tp.value() - tm.value()) / (times[time_idx + 1] - times[time_idx - 1]);
  Vec p(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const ExtReal xp = surface.at(time_idx, state_idx + strides[c]);
    const ExtReal xm = surface.at(time_idx, state_idx - strides[c]);
    if (xp.is_infinite() || xm.is_infinite()) return std::nullopt;
    p[c] = (xp.value() - xm.value()) / (2.0 * states.axes()[c].step);
  }
  const Vec y = states.point(state_idx);
  return v_t + legendre_fenchel(cost, times[time_idx], y, p, velocity_grid).value();
}

double moderation_gap(const CostField& cost, double T, const Vec& x, double omega,
                      const Vec& upsilon, const SolverConfig& cfg) {
  if (!cost.velocity_only) throw MisuseError("moderation_gap: requires a velocity-only cost");
  const ExtReal direct = eval_cost(cost, T, x, upsilon);
  const ModerationResult r = moderate(ModerationProblem{&cost, T, x, omega, upsilon}, cfg);
  if (direct.is_infinite() || r.lambda.is_infinite())
    throw DomainError("moderation_gap: upsilon outside the domain");
  return r.lambda.value() - direct.value();
}

JensenReport jensen_suite(const CostField& cost, const JensenSampleSpec& spec) {
  if (!cost.velocity_only) throw MisuseError("jensen_suite: requires a velocity-only cost");
  JensenReport report;
  report.expected_nonconvex = !cost.convex_in_u;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < spec.samples; ++s) {
    JensenSample sample;
    sample.omega = spec.omega_lo + (spec.omega_hi - spec.omega_lo) * unit(rng);
    sample.upsilon.resize(spec.upsilon_lo.size());
    for (std::size_t c = 0; c < sample.upsilon.size(); ++c)
      sample.upsilon[c] = spec.upsilon_lo[c] + (spec.upsilon_hi[c] - spec.upsilon_lo[c]) * unit(rng);
    sample.gap = moderation_gap(cost, spec.T, spec.x, sample.omega, sample.upsilon, spec.solver);
    report.max_abs_gap = std::max(report.max_abs_gap, std::abs(sample.gap));
    if (!report.expected_nonconvex && std::abs(sample.gap) > spec.tolerance)
      report.failures.push_back(sample);
    report.samples.push_back(std::move(sample));
  }
  return report;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceScenario& scenario,
                                              const std::vector<ConvergenceLevel>& levels) {
  if (levels.size() < 2) throw MisuseError("convergence_study: need at least two levels");
  std::vector<ConvergenceRow> rows;
  for (const auto& level : levels) {
    SolverConfig cfg = scenario.solver;
    cfg.n_steps = level.n_steps;
    const ValueResult formula =
        generalized_lax_hopf(scenario.terminal, scenario.cost, scenario.T, scenario.x, scenario.grid, cfg);
    const ValueSurface surf = dp_oracle(scenario.terminal, scenario.cost, level.grids);
    const ExtReal oracle = surf.at_point(surf.times().size() - 1, scenario.x);
    ConvergenceRow row{level.grids.dt(), formula.value.to_double(), oracle.to_double(), INFINITY};
    if (formula.value.is_finite() && oracle.is_finite())
      row.error = std::abs(formula.value.value() - oracle.value());
    rows.push_back(row);
  }
  return rows;
}

bool final_levels_nonincreasing(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 2) return false;
  return rows[rows.size() - 1].error <= rows[rows.size() - 2].error;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "dt,formula,oracle,error\n";
  for (const auto& r : rows)
    os << format_real(r.dt) << ',' << format_real(r.formula) << ',' << format_real(r.oracle) << ','
       << format_real(r.error) << '\n';
}

}  // namespace laxhopf
