#include "laxhopf/convex.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace laxhopf {

ExtReal legendre_fenchel(const CostField& cost, double t, VecView x, VecView p,
                         const Lattice& velocity_grid) {
  if (velocity_grid.empty()) throw MisuseError("legendre_fenchel: empty velocity grid");
  if (p.size() != velocity_grid.dimension())
    throw MisuseError("legendre_fenchel: dual vector and grid dimensions differ");
  Vec u(velocity_grid.dimension());
  bool any_finite = false;
  double best = -INFINITY;
  for (std::size_t i = 0; i < velocity_grid.size(); ++i) {
    velocity_grid.point(i, u);
    const ExtReal l = eval_cost(cost, t, x, u);
    if (l.is_infinite()) continue;
    any_finite = true;
    best = std::max(best, dot(p, u) - l.value());
  }
  if (!any_finite)
    throw EmptyDomain(fmt::format("legendre_fenchel: cost '{}' is +inf on the whole grid", cost.name));
  return ExtReal(best);
}

bool subdifferential_check(const CostField& cost, double t, VecView x, VecView u, VecView p,
                           const Lattice& grid, double tol) {
  const ExtReal l = eval_cost(cost, t, x, u);
  if (l.is_infinite()) throw MisuseError("subdifferential_check: u outside the domain");
  const double conj = legendre_fenchel(cost, t, x, p, grid).value();
  return std::abs(dot(p, u) - l.value() - conj) <= tol;
}

ConjugateTable build_conjugate_table(const CostField& cost, double t, VecView x,
                                     const Lattice& dual_grid, const Lattice& velocity_grid) {
  ConjugateTable table;
  table.t = t;
  table.x.assign(x.begin(), x.end());
  table.dual_grid = dual_grid;
  table.values.reserve(dual_grid.size());
  Vec p(dual_grid.dimension());
  for (std::size_t i = 0; i < dual_grid.size(); ++i) {
    dual_grid.point(i, p);
    table.values.push_back(legendre_fenchel(cost, t, x, p, velocity_grid).value());
  }
  return table;
}

bool ConjugateTable::is_midpoint_convex(double tol) const {
  const auto& axes = dual_grid.axes();
  std::size_t stride = 1;
  for (std::size_t a = axes.size(); a-- > 0;) {
    const std::size_t n = axes[a].count;
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
      const std::size_t k = (flat / stride) % n;
      if (k == 0 || k + 1 == n) continue;
      const double mid = values[flat];
      const double avg = 0.5 * (values[flat - stride] + values[flat + stride]);
      if (mid > avg + tol * std::max(1.0, std::abs(avg))) return false;
    }
    stride *= n;
  }
  return true;
}

double ConjugateTable::biconjugate(VecView u) const {
  Vec p(dual_grid.dimension());
  double best = -INFINITY;
  for (std::size_t i = 0; i < values.size(); ++i) {
    dual_grid.point(i, p);
    best = std::max(best, dot(p, u) - values[i]);
  }
  return best;
}

double fenchel_young_margin(const CostField& cost, const ConjugateTable& table,
                            const Lattice& velocity_grid) {
  Vec u(velocity_grid.dimension());
  Vec p(table.dual_grid.dimension());
  double margin = INFINITY;
  for (std::size_t i = 0; i < velocity_grid.size(); ++i) {
    velocity_grid.point(i, u);
    const ExtReal l = eval_cost(cost, table.t, table.x, u);
    if (l.is_infinite()) continue;
    for (std::size_t j = 0; j < table.values.size(); ++j) {
      table.dual_grid.point(j, p);
      margin = std::min(margin, l.value() + table.values[j] - dot(p, u));
    }
  }
  return margin;
}

std::size_t MarchaudReport::count(MarchaudViolation::Kind k) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [k](const auto& v) { return v.kind == k; }));
}

MarchaudReport check_marchaud(const CostField& cost, double c_const, const SampleRegion& region,
                              std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw MisuseError("check_marchaud: n_samples must be >= 1");
  using Kind = MarchaudViolation::Kind;
  MarchaudReport report;
  report.samples = n_samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t dim = region.dimension;
  constexpr std::size_t kProbes = 4;

  auto draw_in = [&](double radius) {
    // Uniform in the cube of half-width `radius`, intersected with the domain box.
    Vec u(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      double lo = -radius, hi = radius;
      if (!cost.domain_box.empty()) {
        lo = std::max(lo, cost.domain_box[i].lo);
        hi = std::min(hi, cost.domain_box[i].hi);
      }
      if (hi < lo) hi = lo;
      u[i] = lo + (hi - lo) * 0.5 * (unit(rng) + 1.0);
    }
    return u;
  };

  for (std::size_t s = 0; s < n_samples; ++s) {
    const double t = region.t_lo + (region.t_hi - region.t_lo) * 0.5 * (unit(rng) + 1.0);
    Vec x(dim);
    for (auto& v : x) v = region.x_radius * unit(rng);
    const double radius = c_const * (norm(x) + std::abs(t) + 1.0);
    auto record = [&](Kind k, const Vec& u, std::string detail) {
      report.violations.push_back(MarchaudViolation{k, t, x, u, std::move(detail)});
    };

    // Domain growth: finite cost beyond the admissible radius.
    for (std::size_t p = 0; p < kProbes; ++p) {
      Vec dir(dim);
      for (auto& v : dir) v = unit(rng);
      const double n = norm(dir);
      if (n == 0.0) continue;
      for (auto& v : dir) v *= 1.5 * radius / n;
      const ExtReal l = eval_cost(cost, t, x, dir);
      if (l.is_finite())
        record(Kind::DomainGrowth, dir,
               fmt::format("finite cost at |u|={} > {}", norm(dir), radius));
    }
    if (!cost.domain_box.empty()) {
      Vec corner(dim);
      for (std::size_t i = 0; i < dim; ++i)
        corner[i] = std::max(std::abs(cost.domain_box[i].lo), std::abs(cost.domain_box[i].hi));
      bool finite_box = true;
      for (double v : corner) finite_box = finite_box && std::isfinite(v);
      if (finite_box && norm(corner) > radius * (1.0 + 1e-12)) {
        for (std::size_t i = 0; i < dim; ++i)
          corner[i] = std::abs(cost.domain_box[i].hi) >= std::abs(cost.domain_box[i].lo)
                          ? cost.domain_box[i].hi
                          : cost.domain_box[i].lo;
        if (eval_cost(cost, t, x, corner).is_finite())
          record(Kind::DomainGrowth, corner, "domain box corner beyond the growth radius");
      }
    }

    // Bounds and midpoint convexity on the domain.
    for (std::size_t p = 0; p < kProbes; ++p) {
      const Vec u1 = draw_in(radius);
      const Vec u2 = draw_in(radius);
      const ExtReal l1 = eval_cost(cost, t, x, u1);
      const ExtReal l2 = eval_cost(cost, t, x, u2);
      for (const auto& [u, l] : {std::pair{&u1, l1}, std::pair{&u2, l2}}) {
        if (l.is_infinite()) continue;
        if (l.value() < 0.0) record(Kind::Negative, *u, fmt::format("l={}", l.value()));
        if (l.value() > radius) record(Kind::GrowthBound, *u, fmt::format("l={} > {}", l.value(), radius));
      }
      if (l1.is_finite() && l2.is_finite()) {
        Vec mid(dim);
        for (std::size_t i = 0; i < dim; ++i) mid[i] = 0.5 * (u1[i] + u2[i]);
        const ExtReal lm = eval_cost(cost, t, x, mid);
        const double avg = 0.5 * (l1.value() + l2.value());
        if (lm.is_infinite() || lm.value() > avg + 1e-9 * std::max(1.0, std::abs(avg)))
          record(Kind::Convexity, mid, fmt::format("l(mid)={} > {}", to_string(lm), avg));
      }
    }
  }
  return report;
}

}  // namespace laxhopf
