#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laxhopf/cost.hpp"

namespace laxhopf {

/// l*(t, x, p) = sup_u (<p, u> - l(t, x, u)), maximized exhaustively over
/// `velocity_grid`. The result is a lower bound on the true supremum.
/// Throws EmptyDomain if l is +inf at every lattice point.
ExtReal legendre_fenchel(const CostField& cost, double t, VecView x, VecView p,
                         const Lattice& velocity_grid);

/// Tests p in the subdifferential of l(t, x, .) at u through the
/// Fenchel-Young equality <p, u> = l(t, x, u) + l*(t, x, p).
bool subdifferential_check(const CostField& cost, double t, VecView x, VecView u, VecView p,
                           const Lattice& grid, double tol);

/// Slice of l* at a fixed base point (t, x), tabulated over a dual lattice.
struct ConjugateTable {
  double t = 0.0;
  Vec x;
  Lattice dual_grid;
  std::vector<double> values;  // one per dual lattice point, row-major

  // Discrete midpoint convexity along every axis of the dual lattice.
  bool is_midpoint_convex(double tol = 1e-12) const;

  // sup_p (<p, u> - l*(p)) over the dual lattice.
  double biconjugate(VecView u) const;
};

ConjugateTable build_conjugate_table(const CostField& cost, double t, VecView x,
                                     const Lattice& dual_grid, const Lattice& velocity_grid);

// Smallest value of l(u) + l*(p) - <p, u> over all pairs of the two lattices.
double fenchel_young_margin(const CostField& cost, const ConjugateTable& table,
                            const Lattice& velocity_grid);

struct MarchaudViolation {
  enum class Kind { DomainGrowth, Negative, GrowthBound, Convexity };
  Kind kind;
  double t;
  Vec x;
  Vec u;
  std::string detail;
};

struct MarchaudReport {
  std::size_t samples = 0;
  std::vector<MarchaudViolation> violations;

  bool consistent() const noexcept { return violations.empty(); }
  std::size_t count(MarchaudViolation::Kind k) const;
};

struct SampleRegion {
  double t_lo = 0.0;
  double t_hi = 1.0;
  double x_radius = 1.0;  // samples x in the sup-norm ball of this radius
  std::size_t dimension = 1;
};

/// Samples the Marchaud bounds
///   Dom l(t, x, .) inside the ball of radius c (|x| + |t| + 1),
///   0 <= l(t, x, u) <= c (|x| + |t| + 1) on the domain,
///   convexity in u (midpoint test).
/// Only reports; an empty violation list means consistent at the samples.
MarchaudReport check_marchaud(const CostField& cost, double c_const, const SampleRegion& region,
                              std::size_t n_samples, std::uint64_t seed = 0);

}  // namespace laxhopf
