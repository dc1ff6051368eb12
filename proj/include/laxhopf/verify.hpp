#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "laxhopf/lax_hopf.hpp"

namespace laxhopf {

/// Time grid on [t0, T] plus state and velocity lattices. The velocity step
/// times dt must be an integer multiple of the state step in every
/// coordinate, so that transitions land exactly on lattice nodes.
struct DPGrids {
  double t0 = 0.0;
  double T = 1.0;
  std::size_t n_time = 50;
  Vec state_lo, state_hi, state_step;
  Vec velocity_lo, velocity_hi, velocity_step;

  double dt() const { return (T - t0) / static_cast<double>(n_time); }
};

/// W over (time node, state node).
class ValueSurface {
 public:
  ValueSurface() = default;
  ValueSurface(std::vector<double> times, Lattice states);

  const std::vector<double>& times() const noexcept { return times_; }
  const Lattice& states() const noexcept { return states_; }

  ExtReal& at(std::size_t time_idx, std::size_t state_idx);
  const ExtReal& at(std::size_t time_idx, std::size_t state_idx) const;
  // Value at the lattice node nearest to y; throws if y is off the box.
  ExtReal at_point(std::size_t time_idx, VecView y) const;
  std::optional<std::size_t> node_index(VecView y) const;

 private:
  std::vector<double> times_;
  Lattice states_;
  std::vector<ExtReal> values_;
};

/// Forward value iteration
///   W(t0, y) = c(t0, y)
///   W(t, y)  = min(c(t, y), min_u W(t - dt, y - u dt) + dt l(t - dt/2, mid, u)).
/// Transitions whose predecessor leaves the lattice are excluded.
/// Throws ConfigError if the grids are not commensurate.
ValueSurface dp_oracle(const TerminalCost& terminal, const CostField& cost, const DPGrids& grids);

void write_surface_csv(std::ostream& os, const ValueSurface& surface);

using SurfaceFn = std::function<ExtReal(double t, VecView y)>;

/// dV/dt + l*(t, y, dV/dy) with central differences of step h (time) and
/// h (each state coordinate). Empty if any stencil value is infinite.
std::optional<double> hj_residual(const SurfaceFn& surface, const CostField& cost, double t,
                                  VecView y, double h, const Lattice& velocity_grid);

/// Same residual on a tabulated surface at an interior node, using the
/// surface's own time and state spacings.
std::optional<double> hj_residual(const ValueSurface& surface, const CostField& cost,
                                  std::size_t time_idx, std::size_t state_idx,
                                  const Lattice& velocity_grid);

struct JensenSampleSpec {
  std::size_t samples = 20;
  double omega_lo = 0.1;
  double omega_hi = 2.0;
  Vec upsilon_lo{-2.0};
  Vec upsilon_hi{2.0};
  double T = 1.0;
  Vec x{0.0};
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

struct JensenSample {
  double omega;
  Vec upsilon;
  double gap;
};

struct JensenReport {
  bool expected_nonconvex = false;  // cost not declared convex: negative gaps expected
  double max_abs_gap = 0.0;
  std::vector<JensenSample> samples;
  std::vector<JensenSample> failures;  // |gap| > tolerance on a convex cost

  bool passed() const noexcept { return expected_nonconvex || failures.empty(); }
};

/// Lambda(T, x, omega, upsilon) - l(upsilon) for a velocity-only cost, convex
/// or not. Throws DomainError when either side is infinite.
double moderation_gap(const CostField& cost, double T, const Vec& x, double omega,
                      const Vec& upsilon, const SolverConfig& cfg);

/// Runs the moderation-vs-cost gap over sampled (omega, upsilon).
/// Requires a velocity-only cost.
JensenReport jensen_suite(const CostField& cost, const JensenSampleSpec& spec);

struct ConvergenceLevel {
  std::size_t n_steps = 32;  // inner solver resolution for the formula path
  DPGrids grids;
};

struct ConvergenceScenario {
  TerminalCost terminal;
  CostField cost;
  double T = 1.0;
  Vec x{1.0};
  OuterGrid grid;
  SolverConfig solver;
  std::optional<double> reference;  // closed-form value when known
};

struct ConvergenceRow {
  double dt;
  double formula;
  double oracle;
  double error;  // |formula - oracle|
};

std::vector<ConvergenceRow> convergence_study(const ConvergenceScenario& scenario,
                                              const std::vector<ConvergenceLevel>& levels);

// True when the error column does not increase over the last two levels.
bool final_levels_nonincreasing(const std::vector<ConvergenceRow>& rows);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace laxhopf
