#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "laxhopf/cost.hpp"
#include "laxhopf/rate.hpp"
#include "laxhopf/trajectory.hpp"

namespace laxhopf {

/// Inner solver settings. Defaults follow the documented solver contract.
struct SolverConfig {
  std::size_t n_steps = 32;
  std::size_t max_iterations = 200;
  double initial_step = 1.0;
  double armijo = 1e-4;
  double grad_tol = 1e-8;         // RMS of the projected gradient
  std::size_t max_halvings = 60;  // backtracking cap per iteration
  std::size_t restarts = 8;       // perturbed starts besides the constant one
  double fd_rel_step = 1e-6;
  std::uint64_t seed = 0;
  double tol_solver = 1e-6;       // accuracy contract for certificates
  double tol_quadrature = 1e-9;
  std::size_t threads = 1;
};

/// Inner problem: minimize (1/omega) * integral of l over the window among
/// trajectories ending at x with average transaction upsilon.
struct ModerationProblem {
  const CostField* cost = nullptr;
  double T = 0.0;
  Vec x;
  double omega = 0.0;
  Vec upsilon;
};

struct ModerationResult {
  ExtReal lambda = ExtReal::infinity();
  std::optional<Trajectory> argmin;  // empty when infeasible
  std::size_t iterations = 0;
};

/// Moderated cost by direct transcription: projected gradient descent from
/// the constant trajectory plus `restarts` perturbed starts, best kept.
/// Infeasibility is reported as lambda = +inf with no argmin.
ModerationResult moderate(const ModerationProblem& prob, const SolverConfig& cfg);

/// Same solver, integrand weighted by exp(integral_t^T m) along the
/// candidate trajectory itself. With rate == nullptr this is `moderate`.
ModerationResult moderate_weighted(const ModerationProblem& prob, const RateField* rate,
                                   const SolverConfig& cfg);

/// Weighted objective (1/omega) sum_k dt w_k l_k of a given trajectory.
ExtReal weighted_cumulated_cost(const Trajectory& traj, const CostField& cost,
                                const RateField* rate);

struct ModerationTable {
  std::vector<double> omega_grid;
  Lattice upsilon_grid;
  std::vector<ExtReal> values;  // omega-major, then upsilon flat index
  std::vector<std::optional<Trajectory>> argmins;

  const ExtReal& at(std::size_t omega_idx, std::size_t upsilon_idx) const;
};

ModerationTable build_moderation_table(const CostField& cost, double T, const Vec& x,
                                       const std::vector<double>& omega_grid,
                                       const Lattice& upsilon_grid, const SolverConfig& cfg);

/// Columns omega, upsilon_1..upsilon_l, lambda; +inf written as "inf".
void write_moderation_csv(std::ostream& os, const ModerationTable& table);

/// Lambda(T, x, omega, upsilon) - l(upsilon) for a velocity-only convex cost.
double jensen_gap(const CostField& cost, double T, const Vec& x, double omega, const Vec& upsilon,
                  const SolverConfig& cfg);

}  // namespace laxhopf
