#include "laxhopf/trajectory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace laxhopf {

Window::Window(double terminal, double aperture) : T(terminal), omega(aperture) {
  if (!(aperture >= 0.0) || !std::isfinite(aperture))
    throw DomainError(fmt::format("Window: aperture must be a finite value >= 0, got {}", aperture));
}

Trajectory build_trajectory(const Window& window, const Vec& terminal_state,
                            std::vector<Vec> velocities) {
  if (velocities.empty()) throw MisuseError("build_trajectory: need at least one step");
  if (window.omega == 0.0)
    throw DegenerateWindow("build_trajectory: zero aperture with nonempty velocities");
  const std::size_t dim = terminal_state.size();
  for (const auto& u : velocities)
    if (u.size() != dim) throw MisuseError("build_trajectory: velocity dimension mismatch");

  Trajectory tr;
  tr.window_ = window;
  const std::size_t n = velocities.size();
  tr.dt_ = window.omega / static_cast<double>(n);
  tr.terminal_ = terminal_state;
  tr.states_.assign(n + 1, Vec(dim));
  tr.states_[n] = terminal_state;
  for (std::size_t k = n; k-- > 0;)
    for (std::size_t i = 0; i < dim; ++i)
      tr.states_[k][i] = tr.states_[k + 1][i] - velocities[k][i] * tr.dt_;
  tr.velocities_ = std::move(velocities);
  return tr;
}

Trajectory constant_trajectory(const Window& window, const Vec& terminal_state, const Vec& upsilon,
                               std::size_t n_steps) {
  return build_trajectory(window, terminal_state, std::vector<Vec>(n_steps, upsilon));
}

double Trajectory::node_time(std::size_t k) const {
  return window_.start() + static_cast<double>(k) * dt_;
}

double Trajectory::step_midpoint_time(std::size_t k) const {
  return window_.start() + (static_cast<double>(k) + 0.5) * dt_;
}

Vec Trajectory::step_midpoint_state(std::size_t k) const {
  Vec mid(dimension());
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (states_[k][i] + states_[k + 1][i]);
  return mid;
}

Vec average_transaction(const Trajectory& traj) {
  if (traj.window().omega == 0.0) throw DegenerateWindow("average_transaction: zero aperture");
  Vec avg(traj.dimension(), 0.0);
  for (const auto& u : traj.velocities())
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += u[i];
  const double scale = traj.dt() / traj.window().omega;
  for (auto& v : avg) v *= scale;
  return avg;
}

ExtReal cumulated_cost(const Trajectory& traj, const CostField& cost) {
  ExtReal total(0.0);
  for (std::size_t k = 0; k < traj.n_steps(); ++k) {
    const ExtReal l = eval_cost(cost, traj.step_midpoint_time(k), traj.step_midpoint_state(k),
                                traj.velocities()[k]);
    if (l.is_infinite()) return ExtReal::infinity();
    total += traj.dt() * l;
  }
  return total;
}

double enrichment(double v_start, double v_end, double omega) {
  if (!(omega > 0.0)) throw DomainError(fmt::format("enrichment: aperture must be > 0, got {}", omega));
  return (v_end - v_start) / omega;
}

InterestRates interest_rates(double v_start, double v_end, double omega) {
  if (!(omega > 0.0))
    throw DomainError(fmt::format("interest_rates: aperture must be > 0, got {}", omega));
  const double profit = v_end - v_start;
  InterestRates r;
  if (v_start != 0.0) r.forward = profit / (omega * v_start);
  if (v_end != 0.0) r.backward = profit / (omega * v_end);
  if (v_start * v_end > 0.0) r.symmetric = profit / (omega * std::sqrt(v_start * v_end));
  return r;
}

VelocityBound::VelocityBound(std::vector<std::pair<double, double>> table) : table_(std::move(table)) {
  if (table_.empty()) throw MisuseError("VelocityBound: empty table");
  if (!std::is_sorted(table_.begin(), table_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; }))
    throw MisuseError("VelocityBound: table must be sorted by time");
  for (const auto& [t, g] : table_)
    if (!(g >= 0.0)) throw MisuseError("VelocityBound: bounds must be >= 0");
}

double VelocityBound::at(double t) const {
  if (table_.size() == 1 || t <= table_.front().first) return table_.front().second;
  if (t >= table_.back().first) return table_.back().second;
  auto hi = std::upper_bound(table_.begin(), table_.end(), t,
                             [](double v, const auto& e) { return v < e.first; });
  auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

double VelocityBound::max_value() const {
  double m = 0.0;
  for (const auto& e : table_) m = std::max(m, e.second);
  return m;
}

bool is_admissible(const Trajectory& traj, const AdmissibleSpec& spec, double tol) {
  for (std::size_t k = 0; k < traj.n_steps(); ++k) {
    const double t = traj.step_midpoint_time(k);
    if (norm(traj.velocities()[k]) > spec.velocity_bound.at(t) + tol) return false;
    if (spec.cost != nullptr &&
        eval_cost(*spec.cost, t, traj.step_midpoint_state(k), traj.velocities()[k]).is_infinite())
      return false;
  }
  return true;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t dim = traj.dimension();
  os << "t";
  for (std::size_t i = 1; i <= dim; ++i) os << ",x_" << i;
  for (std::size_t i = 1; i <= dim; ++i) os << ",u_" << i;
  os << '\n';
  for (std::size_t k = 0; k <= traj.n_steps(); ++k) {
    os << format_real(traj.node_time(k));
    for (double v : traj.states()[k]) os << ',' << format_real(v);
    // The terminal node carries the left derivative, i.e. the last step velocity.
    const auto& u = traj.velocities()[std::min(k, traj.n_steps() - 1)];
    for (double v : u) os << ',' << format_real(v);
    os << '\n';
  }
}

}  // namespace laxhopf
