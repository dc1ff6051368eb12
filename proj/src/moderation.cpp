#include "laxhopf/moderation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "laxhopf/parallel.hpp"

namespace laxhopf {

namespace {

// Velocities u[k * dim + c] of an N-step transcription, with the objective
// J(u) = (1/omega) sum_k dt w_k l(t_k, xm_k, u_k) and its gradient.
class Transcription {
 public:
  Transcription(const ModerationProblem& prob, const RateField* rate, std::size_t n_steps)
      : cost_(*prob.cost),
        rate_(rate),
        T_(prob.T),
        x_(prob.x),
        omega_(prob.omega),
        upsilon_(prob.upsilon),
        n_(n_steps),
        dim_(prob.x.size()),
        dt_(prob.omega / static_cast<double>(n_steps)),
        start_(Window(prob.T, prob.omega).start()) {
    states_.assign((n_ + 1) * dim_, 0.0);
    mids_.assign(n_ * dim_, 0.0);
    l_.assign(n_, 0.0);
    m_.assign(n_, 0.0);
    w_.assign(n_, 1.0);
  }

  std::size_t size() const noexcept { return n_ * dim_; }
  std::size_t steps() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  double dt() const noexcept { return dt_; }
  double omega() const noexcept { return omega_; }

  double step_time(std::size_t k) const { return start_ + (static_cast<double>(k) + 0.5) * dt_; }

  // Fills states, midpoints, per-step costs and weights. Returns J(u).
  ExtReal evaluate(const Vec& u) {
    for (std::size_t c = 0; c < dim_; ++c) states_[n_ * dim_ + c] = x_[c];
    for (std::size_t k = n_; k-- > 0;)
      for (std::size_t c = 0; c < dim_; ++c)
        states_[k * dim_ + c] = states_[(k + 1) * dim_ + c] - u[k * dim_ + c] * dt_;
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t c = 0; c < dim_; ++c)
        mids_[k * dim_ + c] = 0.5 * (states_[k * dim_ + c] + states_[(k + 1) * dim_ + c]);

    for (std::size_t k = 0; k < n_; ++k) {
      const ExtReal l = eval_cost(cost_, step_time(k), mid(k), vel(u, k));
      if (l.is_infinite()) return ExtReal::infinity();
      l_[k] = l.value();
    }
    if (rate_ != nullptr) {
      for (std::size_t k = 0; k < n_; ++k) m_[k] = (*rate_)(step_time(k), mid(k), vel(u, k));
      double tail = 0.0;  // integral of m over the steps after k
      for (std::size_t k = n_; k-- > 0;) {
        const double e = std::exp(tail + 0.5 * dt_ * m_[k]);
        if (!std::isfinite(e)) throw RateOverflow(fmt::format("accumulation factor overflows at step {}", k));
        w_[k] = e;
        tail += dt_ * m_[k];
      }
    }
    double total = 0.0;
    for (std::size_t k = 0; k < n_; ++k) total += dt_ * (w_[k] * l_[k]);
    return ExtReal(total / omega_);
  }

  // Gradient of J scaled by omega / dt (the L2-in-time gradient), from
  // central differences of l and m chained through the backward states.
  // Requires a preceding finite evaluate(u).
  void gradient(const Vec& u, Vec& g, double rel_step) {
    g.assign(size(), 0.0);
    Vec lu(size()), lx(size(), 0.0), mu(size(), 0.0), mx(size(), 0.0);
    Vec probe(dim_), pstate(dim_);
    const bool state_free_cost = cost_.velocity_only;
    const bool rate_terms = rate_ != nullptr && !rate_->state_free;

    for (std::size_t k = 0; k < n_; ++k) {
      const double t = step_time(k);
      const auto uk = vel(u, k);
      const auto xk = mid(k);
      for (std::size_t c = 0; c < dim_; ++c) {
        std::copy(uk.begin(), uk.end(), probe.begin());
        lu[k * dim_ + c] = partial(
            [&](double v) { probe[c] = v; return eval_cost(cost_, t, xk, probe); }, uk[c], l_[k], rel_step);
        if (!state_free_cost) {
          std::copy(xk.begin(), xk.end(), pstate.begin());
          lx[k * dim_ + c] = partial(
              [&](double v) { pstate[c] = v; return eval_cost(cost_, t, pstate, uk); }, xk[c], l_[k], rel_step);
        }
        if (rate_terms) {
          std::copy(uk.begin(), uk.end(), probe.begin());
          mu[k * dim_ + c] = partial(
              [&](double v) { probe[c] = v; return ExtReal((*rate_)(t, xk, probe)); }, uk[c], m_[k], rel_step);
          std::copy(xk.begin(), xk.end(), pstate.begin());
          mx[k * dim_ + c] = partial(
              [&](double v) { pstate[c] = v; return ExtReal((*rate_)(t, pstate, uk)); }, xk[c], m_[k], rel_step);
        }
      }
    }

    // d xm_k / d u_j = -dt/2 (j == k), -dt (j > k).
    for (std::size_t c = 0; c < dim_; ++c) {
      double prefix = 0.0;  // sum_{k<j} w_k lx_k
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t jc = j * dim_ + c;
        g[jc] = w_[j] * (lu[jc] - 0.5 * dt_ * lx[jc]) - dt_ * prefix;
        prefix += w_[j] * lx[jc];
      }
    }
    if (!rate_terms) return;

    // Weight derivatives: w_k = exp(E_k), E_k = sum_{i>k} dt m_i + dt m_k / 2.
    for (std::size_t c = 0; c < dim_; ++c) {
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t jc = j * dim_ + c;
        const double direct = dt_ * (mu[jc] - 0.5 * dt_ * mx[jc]);
        double acc = 0.5 * direct * l_[j] * w_[j];
        double between = 0.0;  // sum_{i=k+1}^{j-1} dt * (-dt mx_i)
        for (std::size_t k = j; k-- > 0;) {
          const std::size_t kc = k * dim_ + c;
          const double dE = direct + between - 0.5 * dt_ * dt_ * mx[kc];
          acc += l_[k] * w_[k] * dE;
          between -= dt_ * dt_ * mx[kc];
        }
        g[jc] += acc;
      }
    }
  }

  std::span<const double> vel(const Vec& u, std::size_t k) const {
    return std::span<const double>(u).subspan(k * dim_, dim_);
  }
  std::span<const double> mid(std::size_t k) const {
    return std::span<const double>(mids_).subspan(k * dim_, dim_);
  }

  Trajectory to_trajectory(const Vec& u) const {
    std::vector<Vec> vels(n_, Vec(dim_));
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t c = 0; c < dim_; ++c) vels[k][c] = u[k * dim_ + c];
    return build_trajectory(Window(T_, omega_), x_, std::move(vels));
  }

 private:
  template <typename F>
  static double partial(F&& f, double at, double f0, double rel_step) {
    const double h = rel_step * std::max(1.0, std::abs(at));
    const ExtReal fp = f(at + h);
    const ExtReal fm = f(at - h);
    if (fp.is_finite() && fm.is_finite()) return (fp.value() - fm.value()) / (2.0 * h);
    if (fp.is_finite()) return (fp.value() - f0) / h;
    if (fm.is_finite()) return (f0 - fm.value()) / h;
    return 0.0;
  }

  const CostField& cost_;
  const RateField* rate_;
  double T_;
  Vec x_;
  double omega_;
  Vec upsilon_;
  std::size_t n_, dim_;
  double dt_, start_;
  Vec states_, mids_, l_, m_, w_;
};

// Euclidean projection of v onto {mean = target, lo <= v <= hi}, coordinate
// by coordinate: find the shift tau with mean(clip(v - tau)) = target.
void project_coordinate(Vec& u, std::size_t n, std::size_t dim, std::size_t c, double lo, double hi,
                        double target) {
  auto at = [&](std::size_t k) -> double& { return u[k * dim + c]; };
  const double count = static_cast<double>(n);
  if (lo == hi) {
    for (std::size_t k = 0; k < n; ++k) at(k) = lo;
    return;
  }
  Vec v(n);
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += (v[k] = at(k));
  mean /= count;
  auto clipped_mean = [&](double tau) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += std::clamp(v[k] - tau, lo, hi);
    return s / count;
  };
  double tau = mean - target;
  if (std::isfinite(lo) || std::isfinite(hi)) {
    // clipped_mean is nonincreasing in tau
    double a = tau - 1.0, b = tau + 1.0;
    for (int i = 0; i < 200 && clipped_mean(a) < target; ++i) a -= 2.0 * (b - a);
    for (int i = 0; i < 200 && clipped_mean(b) > target; ++i) b += 2.0 * (b - a);
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (clipped_mean(m) > target ? a : b) = m;
    }
    tau = 0.5 * (a + b);
  }
  for (std::size_t k = 0; k < n; ++k) at(k) = std::clamp(v[k] - tau, lo, hi);

  // Spread the rounding residual over the coordinates strictly inside the box.
  for (int pass = 0; pass < 4; ++pass) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += at(k);
    const double err = target - s / count;
    if (err == 0.0) break;
    std::size_t free = 0;
    for (std::size_t k = 0; k < n; ++k) free += (at(k) > lo && at(k) < hi) ? 1 : 0;
    if (free == 0) break;
    const double shift = err * count / static_cast<double>(free);
    for (std::size_t k = 0; k < n; ++k)
      if (at(k) > lo && at(k) < hi) at(k) = std::clamp(at(k) + shift, lo, hi);
  }
}

void project(Vec& u, std::size_t n, std::size_t dim, const Box& box, const Vec& upsilon) {
  for (std::size_t c = 0; c < dim; ++c) {
    const double lo = box.empty() ? -INFINITY : box[c].lo;
    const double hi = box.empty() ? INFINITY : box[c].hi;
    project_coordinate(u, n, dim, c, lo, hi, upsilon[c]);
  }
}

struct Descent {
  ExtReal value = ExtReal::infinity();
  Vec u;
  std::size_t iterations = 0;
};

Descent projected_descent(Transcription& tr, Vec u, const Box& box, const Vec& upsilon,
                          const SolverConfig& cfg) {
  Descent out;
  ExtReal J = tr.evaluate(u);
  if (J.is_infinite()) return out;
  const std::size_t n = tr.steps(), dim = tr.dim(), size = tr.size();
  const double metric = tr.dt() / tr.omega();  // scaled gradient -> true gradient
  Vec g, trial(size);
  // Barzilai-Borwein trial step from the last accepted move, then Armijo
  // halving. A fixed unit step oscillates when the scaled curvature exceeds 1.
  Vec u_prev, g_prev;
  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    tr.gradient(u, g, cfg.fd_rel_step);
    for (std::size_t i = 0; i < size; ++i) trial[i] = u[i] - g[i];
    project(trial, n, dim, box, upsilon);
    double pg = 0.0;
    for (std::size_t i = 0; i < size; ++i) pg += (trial[i] - u[i]) * (trial[i] - u[i]);
    if (std::sqrt(pg / static_cast<double>(size)) < cfg.grad_tol) break;

    double step = cfg.initial_step;
    if (!u_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < size; ++i) {
        const double du = u[i] - u_prev[i];
        ss += du * du;
        sy += du * (g[i] - g_prev[i]);
      }
      if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-6 * cfg.initial_step, 1e3 * cfg.initial_step);
    }
    u_prev = u;
    g_prev = g;
    bool accepted = false;
    for (std::size_t h = 0; h <= cfg.max_halvings; ++h, step *= 0.5) {
      for (std::size_t i = 0; i < size; ++i) trial[i] = u[i] - step * g[i];
      project(trial, n, dim, box, upsilon);
      double slope = 0.0;
      for (std::size_t i = 0; i < size; ++i) slope += metric * g[i] * (trial[i] - u[i]);
      if (trial == u) break;
      const ExtReal Jt = tr.evaluate(trial);
      if (Jt.is_finite() && Jt.value() <= J.value() + cfg.armijo * slope) {
        u.swap(trial);
        J = Jt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  tr.evaluate(u);  // leave the transcription consistent with u
  out.value = J;
  out.u = std::move(u);
  out.iterations = it;
  return out;
}

std::uint64_t problem_tag(const ModerationProblem& prob) {
  std::uint64_t h = hash_double(prob.T);
  h = mix_seed(h, hash_double(prob.omega));
  for (double v : prob.x) h = mix_seed(h, hash_double(v));
  for (double v : prob.upsilon) h = mix_seed(h, hash_double(v));
  return h;
}

}  // namespace

ModerationResult moderate_weighted(const ModerationProblem& prob, const RateField* rate,
                                   const SolverConfig& cfg) {
  if (prob.cost == nullptr) throw MisuseError("moderate: no cost");
  if (!(prob.omega > 0.0)) throw DomainError("moderate: aperture must be > 0");
  if (cfg.n_steps == 0) throw MisuseError("moderate: n_steps must be >= 1");
  const std::size_t dim = prob.x.size();
  if (prob.upsilon.size() != dim || prob.cost->dimension != dim)
    throw MisuseError("moderate: dimension mismatch between x, upsilon and the cost");

  ModerationResult result;
  const Box& box = prob.cost->domain_box;
  if (!box_contains(box, prob.upsilon)) return result;  // mean outside the box: infeasible

  Transcription tr(prob, rate, cfg.n_steps);
  const std::size_t n = tr.steps();
  const std::size_t size = tr.size();

  std::mt19937_64 rng(mix_seed(cfg.seed, problem_tag(prob)));
  const double spread = 0.5 * norm(prob.upsilon) + 0.1;
  std::uniform_real_distribution<double> noise(-spread, spread);

  Descent best;
  for (std::size_t start = 0; start <= cfg.restarts; ++start) {
    Vec u(size);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < dim; ++c) u[k * dim + c] = prob.upsilon[c];
    if (start > 0) {
      for (auto& v : u) v += noise(rng);
    }
    project(u, n, dim, box, prob.upsilon);
    Descent d = projected_descent(tr, std::move(u), box, prob.upsilon, cfg);
    result.iterations += d.iterations;
    if (d.value < best.value) best = std::move(d);
  }
  if (best.value.is_infinite()) return result;
  result.lambda = best.value;
  result.argmin = tr.to_trajectory(best.u);
  return result;
}

ModerationResult moderate(const ModerationProblem& prob, const SolverConfig& cfg) {
  return moderate_weighted(prob, nullptr, cfg);
}

ExtReal weighted_cumulated_cost(const Trajectory& traj, const CostField& cost,
                                const RateField* rate) {
  const std::size_t n = traj.n_steps();
  std::vector<double> l(n), w(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const ExtReal v = eval_cost(cost, traj.step_midpoint_time(k), traj.step_midpoint_state(k),
                                traj.velocities()[k]);
    if (v.is_infinite()) return ExtReal::infinity();
    l[k] = v.value();
  }
  if (rate != nullptr) {
    double tail = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      const double m = (*rate)(traj.step_midpoint_time(k), traj.step_midpoint_state(k),
                               traj.velocities()[k]);
      w[k] = std::exp(tail + 0.5 * traj.dt() * m);
      if (!std::isfinite(w[k])) throw RateOverflow(fmt::format("accumulation factor overflows at step {}", k));
      tail += traj.dt() * m;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += traj.dt() * (w[k] * l[k]);
  return ExtReal(total / traj.window().omega);
}

const ExtReal& ModerationTable::at(std::size_t omega_idx, std::size_t upsilon_idx) const {
  return values.at(omega_idx * upsilon_grid.size() + upsilon_idx);
}

ModerationTable build_moderation_table(const CostField& cost, double T, const Vec& x,
                                       const std::vector<double>& omega_grid,
                                       const Lattice& upsilon_grid, const SolverConfig& cfg) {
  if (omega_grid.empty() || upsilon_grid.empty())
    throw MisuseError("build_moderation_table: empty grid");
  ModerationTable table;
  table.omega_grid = omega_grid;
  std::sort(table.omega_grid.begin(), table.omega_grid.end());
  table.upsilon_grid = upsilon_grid;
  const std::size_t nu = upsilon_grid.size();
  const std::size_t total = table.omega_grid.size() * nu;
  table.values.assign(total, ExtReal::infinity());
  table.argmins.assign(total, std::nullopt);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    ModerationProblem prob{&cost, T, x, table.omega_grid[i / nu], upsilon_grid.point(i % nu)};
    ModerationResult r = moderate(prob, cfg);
    table.values[i] = r.lambda;
    table.argmins[i] = std::move(r.argmin);
  });
  return table;
}

void write_moderation_csv(std::ostream& os, const ModerationTable& table) {
  const std::size_t dim = table.upsilon_grid.dimension();
  os << "omega";
  for (std::size_t i = 1; i <= dim; ++i) os << ",upsilon_" << i;
  os << ",lambda\n";
  const std::size_t nu = table.upsilon_grid.size();
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    os << format_real(table.omega_grid[i / nu]);
    for (double v : table.upsilon_grid.point(i % nu)) os << ',' << format_real(v);
    os << ',' << to_string(table.values[i]) << '\n';
  }
}

double jensen_gap(const CostField& cost, double T, const Vec& x, double omega, const Vec& upsilon,
                  const SolverConfig& cfg) {
  if (!cost.velocity_only || !cost.convex_in_u)
    throw MisuseError("jensen_gap: requires a velocity-only cost declared convex in u");
  const ExtReal direct = eval_cost(cost, T, x, upsilon);
  if (direct.is_infinite()) throw DomainError("jensen_gap: upsilon outside the domain of l");
  const ModerationResult r = moderate(ModerationProblem{&cost, T, x, omega, upsilon}, cfg);
  if (r.lambda.is_infinite()) throw DomainError("jensen_gap: moderation infeasible");
  return r.lambda.value() - direct.value();
}

}  // namespace laxhopf
