// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "laxhopf/discounted.hpp"
#include "laxhopf/economy.hpp"
#include "laxhopf/scenario.hpp"
#include "laxhopf/verify.hpp"

using namespace laxhopf;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

const TerminalCost& origin() {
  static const TerminalCost c = terminals::indicator_point(0.0, {0.0});
  return c;
}

OuterGrid unit_grid() { return OuterGrid::uniform(1.0, 10, {-3.0}, {3.0}, {0.25}); }

Verdict classic_benchmark() {
  double worst_err = 0.0, worst_time = 0.0;
  bool shape = true;
  for (double x : {0.5, 1.0, 2.0}) {
    const auto t0 = Clock::now();
    const ValueResult r = classic_lax_hopf(origin(), costs::quadratic(), 1.0, {x}, unit_grid());
    worst_time = std::max(worst_time, seconds_since(t0));
    worst_err = std::max(worst_err, std::abs(r.value.value() - 0.5 * x * x));
    shape = shape && r.omega_star == 1.0 && std::abs(r.upsilon_star[0] - x) <= 1e-9;
  }
  return {worst_err <= 1e-6 && shape && worst_time < 1.0,
          fmt::format("max |V - x^2/2| = {:.2e}, argmin ok = {}, slowest point {:.3f} s", worst_err, shape,
                      worst_time)};
}

Verdict jensen() {
  const auto t0 = Clock::now();
  JensenSampleSpec spec;
  spec.seed = 2024;
  const double q = jensen_suite(costs::quadratic(), spec).max_abs_gap;
  const double a = jensen_suite(costs::abs(), spec).max_abs_gap;
  const double t = seconds_since(t0);
  return {std::max(q, a) <= 1e-5 && t < 10.0,
          fmt::format("max gap u^2/2 {:.2e}, |u| {:.2e}, {:.3f} s", q, a, t)};
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  const CostField cost = costs::weighted_quadratic(1.0, 1.0);
  SolverConfig cfg;
  cfg.n_steps = 64;
  const ValueResult formula = generalized_lax_hopf(origin(), cost, 1.0, {1.0}, unit_grid(), cfg);
  const double v = formula.value.value();
  const double reference = 1.0 / (2.0 * std::log(2.0));

  auto oracle = [&](double dt, double vstep, double sstep) {
    DPGrids g;
    g.T = 1.0;
    g.n_time = static_cast<std::size_t>(std::lround(1.0 / dt));
    g.state_lo = {-0.2};
    g.state_hi = {1.2};
    g.state_step = {sstep};
    g.velocity_lo = {-1.0};
    g.velocity_hi = {3.0};
    g.velocity_step = {vstep};
    const ValueSurface s = dp_oracle(origin(), cost, g);
    return s.at_point(s.times().size() - 1, Vec{1.0}).value();
  };
  // Velocity step times dt must be a multiple of the state step.
  const double e1 = std::abs(v - oracle(0.02, 0.1, 0.002));
  const double e2 = std::abs(v - oracle(0.01, 0.05, 0.0005));
  const double t = seconds_since(t0);
  const bool ok = e1 / v <= 0.02 && e2 < e1 && std::abs(v - reference) <= 2e-3 && t < 60.0;
  return {ok, fmt::format("formula {:.6f} vs 1/(2 ln 2) {:.6f}; rel. error vs DP {:.2e} (dt 0.02) -> {:.2e} "
                          "(dt 0.01); {:.2f} s",
                          v, reference, e1 / v, e2 / v, t)};
}

Verdict certificates() {
  const TerminalCost sq = terminals::squared_norm();
  double exact = 0.0, solver = 0.0;
  exact = std::max(exact, *classic_lax_hopf(origin(), costs::quadratic(), 1.0, {1.0}, unit_grid())
                               .certificate_residual);
  exact = std::max(exact, *classic_lax_hopf(sq, costs::weighted_quadratic(2.0, 0.0), 1.0, {1.0}, unit_grid())
                               .certificate_residual);

  const SolverConfig cfg;
  solver = std::max(solver, *generalized_lax_hopf(origin(), costs::weighted_quadratic(1.0, 1.0), 1.0, {1.0},
                                                  unit_grid(), cfg)
                                 .certificate_residual);
  solver = std::max(solver, *generalized_lax_hopf(sq, costs::weighted_quadratic(1.0, 1.0), 1.0, {1.0},
                                                  unit_grid(), cfg)
                                 .certificate_residual);
  const CostField q2 = costs::weighted_quadratic(2.0, 0.0);
  const ValueResult d = discounted_value(sq, q2, rates::constant(0.1), 1.0, {1.0}, unit_grid(), cfg);
  solver = std::max(solver, *actualized_enrichment_certificate(d, sq, q2, rates::constant(0.1)));

  const EconomyLayout layout{1, 1, false};
  const TerminalCost zero_economy = terminals::indicator_point(0.0, {0.0, 0.0});
  const ImpetusCostSpec spec{[](double e) { return e * e; }, "square", VelocityBound(5.0), {VelocityBound(5.0)}, false};
  SolverConfig ecfg;
  ecfg.n_steps = 16;
  const ValueResult e = economic_value(zero_economy, spec, layout, 1.0, EconomyState{{{1.0}}, {{1.0}}},
                                       OuterGrid::uniform(1.0, 4, {-2.0, -2.0}, {2.0, 2.0}, {0.5, 0.5}), ecfg);
  solver = std::max(solver, *economy_enrichment_certificate(e, zero_economy, spec, layout));
  return {exact <= 1e-6 && solver <= 1e-4,
          fmt::format("exact benchmarks {:.2e}, solver-based (generalized, discounted, economy) {:.2e}", exact,
                      solver)};
}

Verdict obstacle_and_boundary() {
  const TerminalCost sq = terminals::squared_norm();
  const CostField cost = costs::weighted_quadratic(1.0, 1.0);
  OuterGrid grid = OuterGrid::uniform(1.0, 5, {-3.0}, {3.0}, {0.5});
  std::size_t violations = 0;
  double worst = -INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double x = -2.0 + 4.0 * i / 99.0;
    const ValueResult r = generalized_lax_hopf(sq, cost, 1.0, {x}, grid, {});
    const double c = sq(1.0, Vec{x}).value();
    worst = std::max(worst, r.value.value() - c);
    violations += !(r.value <= sq(1.0, Vec{x}));
  }
  std::vector<Vec> states;
  for (int i = -300; i <= 300; ++i) states.push_back(Vec{i * 0.01});
  bool boundary = true;
  for (double x : {-1.3, 0.0, 0.77, 2.5})
    boundary = boundary && wtp_value(sq, 1.0, 1.0, {x}, 0.0, states) == sq(1.0, Vec{x});
  boundary = boundary && wtp_value(origin(), 1.0, 1.0, {0.3}, 0.0, states) == origin()(1.0, Vec{0.3});
  return {violations == 0 && boundary,
          fmt::format("V <= c at {}/100 points (max V - c = {:.3g}); wtp at zero aperture exact = {}",
                      100 - violations, worst, boundary)};
}

Verdict zero_rate() {
  const TerminalCost sq = terminals::squared_norm();
  SolverConfig cfg;
  cfg.seed = 77;
  bool same = true;
  for (const CostField& cost : {costs::weighted_quadratic(1.0, 1.0), costs::double_well()}) {
    for (double x : {-0.7, 1.0}) {
      const ValueResult a = generalized_lax_hopf(sq, cost, 1.0, {x}, unit_grid(), cfg);
      const ValueResult b = discounted_value(sq, cost, rates::zero(), 1.0, {x}, unit_grid(), cfg);
      same = same && a.value == b.value && a.omega_star == b.omega_star && a.upsilon_star == b.upsilon_star &&
             a.start_state == b.start_state && a.moderated_cost == b.moderated_cost &&
             a.certificate_residual == b.certificate_residual &&
             (!a.trajectory || a.trajectory->velocities() == b.trajectory->velocities());
    }
  }
  return {same, fmt::format("bit-identical values, optimizers, trajectories and certificates = {}", same)};
}

Verdict hj_residual_check() {
  SurfaceFn hopf = [](double t, VecView y) { return ExtReal(y[0] * y[0] / (2.0 * t)); };
  const CostField q = costs::quadratic();
  auto max_residual = [&](double h) {
    // The conjugate lattice is refined with the stencil so both errors shrink together.
    const Lattice vel = Lattice::uniform({-5.0}, {5.0}, {10.0 * h});
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double t = 0.5 + i / 19.0, x = -1.0 + 2.0 * j / 19.0;
        worst = std::max(worst, std::abs(*hj_residual(hopf, q, t, Vec{x}, h, vel)));
      }
    return worst;
  };
  const double a = max_residual(1e-3), b = max_residual(5e-4);
  return {a <= 1e-3 && b < a, fmt::format("max residual {:.2e} at h=1e-3, {:.2e} at h=5e-4", a, b)};
}

Verdict economy_checks() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = d(rng), b = d(rng), c = d(rng), e = d(rng), w = 1.0 + d(rng);
    auto state = [&](double t) {
      return EconomyState{{{a + b * std::sin(w * t), c * t * t}, {std::exp(e * t), 1.0}},
                          {{1.0 + e * t, std::cos(t)}, {t, c}}};
    };
    const double t = d(rng), h = 1e-3;
    const EconomyVelocity v{{{b * w * std::cos(w * t), 2.0 * c * t}, {e * std::exp(e * t), 0.0}},
                            {{e, -std::sin(t)}, {1.0, 0.0}}};
    const double fd = (patrimonial_value(state(t + h)) - patrimonial_value(state(t - h))) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - impetus(state(t), v)));
  }

  const EconomyLayout layout{1, 1, false};
  const ImpetusCostSpec spec{[](double e) { return 0.5 * e * e; }, "half_square", VelocityBound(0.0),
                             {VelocityBound(3.0)}, false};
  SolverConfig cfg;
  cfg.n_steps = 16;
  const ValueResult econ =
      economic_value(terminals::squared_norm(), spec, layout, 1.0, EconomyState{{{1.0}}, {{1.0}}},
                     OuterGrid::uniform(1.0, 10, {-2.0, 0.0}, {2.0, 0.0}, {0.25, 0.25}), cfg);
  // Price frozen at 1: l(E) = u^2 / 2 on |u| <= 3 and c = x^2 + 1.
  const TerminalCost shifted{[](double, VecView y) { return ExtReal(y[0] * y[0] + 1.0); }, {}, "shifted"};
  const ValueResult core = generalized_lax_hopf(shifted, costs::with_box(costs::quadratic(), Box{{-3.0, 3.0}}), 1.0,
                                                {1.0}, OuterGrid::uniform(1.0, 10, {-2.0}, {2.0}, {0.25}), cfg);
  const double gap = std::abs(econ.value.value() - core.value.value());
  return {worst <= 1e-3 && gap <= cfg.tol_solver,
          fmt::format("product rule max error {:.2e}; frozen-price gap {:.2e}", worst, gap)};
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t suite_hash(const fs::path& out) {
  fs::remove_all(out);
  const fs::path configs = LAXHOPF_CONFIG_DIR;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(configs))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a("");
  for (const auto& f : files) {
    const fs::path dir = out / f.stem();
    const scenario::Outcome o = scenario::run(scenario::load_config(f), scenario::Options{dir, 12345, 2});
    h = fnv1a(o.summary, h);
    std::vector<fs::path> artifacts;
    for (const auto& entry : fs::directory_iterator(dir)) artifacts.push_back(entry.path());
    std::sort(artifacts.begin(), artifacts.end());
    for (const auto& a : artifacts) {
      std::ifstream is(a, std::ios::binary);
      std::ostringstream os;
      os << is.rdbuf();
      h = fnv1a(a.filename().string() + os.str(), h);
    }
  }
  return h;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "laxhopf_acceptance";
  const std::uint64_t a = suite_hash(root / "a");
  const std::uint64_t b = suite_hash(root / "b");
  return {a == b, fmt::format("artifact hashes {:016x} / {:016x}", a, b)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"classic benchmark", classic_benchmark},
      {"Jensen coincidence", jensen},
      {"generalized formula vs DP oracle", oracle_equivalence},
      {"enrichment certificates", certificates},
      {"obstacle and instantaneous boundary", obstacle_and_boundary},
      {"zero-rate reduction", zero_rate},
      {"HJ residual", hj_residual_check},
      {"economy product rule and frozen prices", economy_checks},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !v.pass;
    fmt::print("{} criterion {}: {}: {}\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
  }
  return failed == 0 ? 0 : 1;
}
