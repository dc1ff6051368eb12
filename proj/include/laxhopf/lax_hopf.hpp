#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "laxhopf/moderation.hpp"

namespace laxhopf {

/// Search domain of the outer minimization over (omega, upsilon).
struct OuterGrid {
  std::vector<double> omega_values;  // must contain 0
  Lattice upsilon_lattice;
  bool refine = true;
  std::size_t rounds = 10;  // pattern-search rounds
  double shrink = 0.5;
  bool use_anchors = true;  // add the cells aiming at terminal-cost anchors
  double omega_max = 0.0;   // upper clamp for refinement; 0 means max(omega_values)

  // omega in {0, omega_max/n, ..., omega_max} and a uniform upsilon lattice.
  static OuterGrid uniform(double omega_max, std::size_t n_omega, const Vec& upsilon_lo,
                           const Vec& upsilon_hi, const Vec& upsilon_step);
};

struct ValueResult {
  double T = 0.0;
  Vec x;
  ExtReal value = ExtReal::infinity();
  bool has_optimizer = false;
  double omega_star = 0.0;
  Vec upsilon_star;
  Vec start_state;
  ExtReal moderated_cost = ExtReal::infinity();  // Lambda (or l) at the optimum
  ExtReal terminal_part = ExtReal::infinity();   // discount * c at the start state
  double discount = 1.0;                         // accumulation factor on c
  std::optional<Trajectory> trajectory;
  std::optional<double> certificate_residual;    // empty when omega_star = 0
  std::size_t cells_evaluated = 0;
  std::string rate_model;                        // set by the discounted solver
};

/// Classic formula inf (c(T - omega, x - omega upsilon) + omega l(upsilon))
/// for a velocity-only convex cost. Optimal trajectory is the straight line.
ValueResult classic_lax_hopf(const TerminalCost& terminal, const CostField& cost, double T,
                             const Vec& x, const OuterGrid& grid, std::size_t n_steps = 32);

/// Generalized formula with omega * Lambda(T, x, omega, upsilon) in place of
/// omega * l(upsilon). Optimal trajectory is the moderation argmin.
ValueResult generalized_lax_hopf(const TerminalCost& terminal, const CostField& cost, double T,
                                 const Vec& x, const OuterGrid& grid, const SolverConfig& cfg);

/// |enrichment(c(T - omega*, start), value, omega*) - lambda|. Empty when the
/// optimum is instantaneous (omega* = 0) or when no optimizer exists.
std::optional<double> optimum_certificate(const ValueResult& result, const TerminalCost& terminal,
                                          ExtReal moderation_lambda);

struct ProfilePoint {
  double t;
  double value;
};

/// Running value c(start) + integral of l from T - omega* to t, per node.
std::vector<ProfilePoint> dynamic_value_profile(const ValueResult& result,
                                                const TerminalCost& terminal,
                                                const CostField& cost);

/// Willingness-to-pay value: min of c(T - omega, y) over grid points y
/// reachable with speed <= velocity_bound, i.e. |y - x| <= omega * bound.
ExtReal wtp_value(const TerminalCost& terminal, double velocity_bound, double T, const Vec& x,
                  double omega, const std::vector<Vec>& state_grid);

/// Fields value, omega_star, upsilon_star, start_state, certificate_residual
/// (plus rate_model when set). +inf is written as the string "inf".
void write_value_json(std::ostream& os, const ValueResult& result);

namespace detail {

// Shared outer search. `cell` maps (omega, upsilon) to a filled result cell
// with at least value set; infinite cells are discarded by the fold.
struct Cell {
  double omega = 0.0;
  Vec upsilon;
  ExtReal value = ExtReal::infinity();
  ExtReal lambda = ExtReal::infinity();
  ExtReal terminal_part = ExtReal::infinity();
  double discount = 1.0;
  std::optional<Trajectory> trajectory;
};

using CellFn = std::function<Cell(double omega, const Vec& upsilon)>;

ValueResult outer_search(const TerminalCost& terminal, double T, const Vec& x,
                         const OuterGrid& grid, std::size_t threads, const CellFn& cell);

}  // namespace detail

}  // namespace laxhopf
