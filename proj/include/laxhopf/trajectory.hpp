#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "laxhopf/cost.hpp"

namespace laxhopf {

/// Temporal window [T - omega, T]. Zero aperture is an instant.
struct Window {
  double T = 0.0;
  double omega = 0.0;

  Window() = default;
  Window(double terminal, double aperture);
  double start() const noexcept { return T - omega; }
};

/// Piecewise-constant-velocity evolution on a uniform grid, anchored at its
/// terminal state: x_N = x(T), x_k = x_{k+1} - u_k * dt.
class Trajectory {
 public:
  Trajectory() = default;

  std::size_t n_steps() const noexcept { return velocities_.size(); }
  std::size_t dimension() const noexcept { return terminal_.size(); }
  const Window& window() const noexcept { return window_; }
  double dt() const noexcept { return dt_; }

  const Vec& terminal_state() const noexcept { return terminal_; }
  const Vec& start_state() const noexcept { return states_.front(); }
  const std::vector<Vec>& states() const noexcept { return states_; }      // N + 1 nodes
  const std::vector<Vec>& velocities() const noexcept { return velocities_; }  // N steps

  double node_time(std::size_t k) const;
  double step_midpoint_time(std::size_t k) const;
  Vec step_midpoint_state(std::size_t k) const;

  friend Trajectory build_trajectory(const Window&, const Vec&, std::vector<Vec>);

 private:
  Window window_;
  double dt_ = 0.0;
  Vec terminal_;
  std::vector<Vec> velocities_;
  std::vector<Vec> states_;
};

/// Throws DegenerateWindow for zero aperture and MisuseError for an empty
/// velocity sequence or mismatched dimensions.
Trajectory build_trajectory(const Window& window, const Vec& terminal_state,
                            std::vector<Vec> velocities);

// Straight line with constant velocity `upsilon`.
Trajectory constant_trajectory(const Window& window, const Vec& terminal_state, const Vec& upsilon,
                               std::size_t n_steps);

/// (x(T) - x(T - omega)) / omega.
Vec average_transaction(const Trajectory& traj);

/// Midpoint quadrature of l along the trajectory; +inf if any step is.
ExtReal cumulated_cost(const Trajectory& traj, const CostField& cost);

/// Enrichment (v_end - v_start) / omega. Throws DomainError if omega <= 0.
double enrichment(double v_start, double v_end, double omega);

struct InterestRates {
  std::optional<double> forward;    // divides by V(T - omega)
  std::optional<double> backward;   // divides by V(T)
  std::optional<double> symmetric;  // divides by sqrt(V(T) V(T - omega))
};

InterestRates interest_rates(double v_start, double v_end, double omega);

/// Velocity bound gamma(t), constant or piecewise linear in t.
class VelocityBound {
 public:
  VelocityBound() = default;
  explicit VelocityBound(double constant) : table_{{0.0, constant}} {}
  // (t, gamma) pairs sorted by t; values clamp outside the table range.
  explicit VelocityBound(std::vector<std::pair<double, double>> table);

  double at(double t) const;
  double max_value() const;

 private:
  std::vector<std::pair<double, double>> table_{{0.0, INFINITY}};
};

/// Velocities bounded in Euclidean norm by gamma(t), and optionally finite cost.
struct AdmissibleSpec {
  VelocityBound velocity_bound;
  const CostField* cost = nullptr;
};

bool is_admissible(const Trajectory& traj, const AdmissibleSpec& spec, double tol = 1e-12);

/// Columns t, x_1..x_l, u_1..u_l; one row per node, velocities left-aligned
/// with step start (the terminal row repeats the last velocity).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace laxhopf
