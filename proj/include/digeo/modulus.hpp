#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "digeo/geometry.hpp"

namespace digeo {

// One evaluated point of a modulus-of-convexity curve. `upper` is the best
// feasible pair value found (an upper bound for the infimum), always backed
// by the stored witness pair; `certified` is a branch-and-bound Lipschitz
// lower bound when the search dimension permits one.
struct ModulusPoint {
  double eps = 0.0;
  double upper = 0.0;
  std::optional<double> certified;
  Vector witness_x, witness_y;
};

struct ModulusCurve {
  std::vector<double> eps;
  std::vector<double> upper;
  std::vector<double> certified;  // empty when certification is unavailable
  std::vector<std::pair<Vector, Vector>> witnesses;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;

  bool has_certified() const { return !certified.empty(); }
  std::size_t size() const { return eps.size(); }

  // Values used as bounds: certified when present, best-found otherwise.
  const std::vector<double>& bound_series() const { return has_certified() ? certified : upper; }

  // Piecewise-linear evaluation of the measured values; below the smallest
  // grid point the segment through the origin is used (the curve vanishes at
  // 0), above the largest the last value is held. Certified bounds vanish at
  // small separations, so compositions read the measured curve.
  double eval_linear(double e) const;

  // Largest grid node <= e (0 below the grid), read from bound_series().
  // Valid as a lower bound for a nondecreasing modulus, which linear
  // interpolation is not.
  double eval_step_lower(double e) const;
};

// delta_X(eps) = inf{1 - ||(x+y)/2|| : x,y in B_X, ||x-y|| >= eps}, explored
// by seeded multistart + projected coordinate descent. Certification runs on
// the space's 2-dimensional surrogate when one exists.
ModulusPoint global_modulus_estimate(SpaceRef space, double eps, std::uint64_t budget,
                                     std::uint64_t seed, bool want_certified = false,
                                     std::uint64_t cert_budget = 40000);

// inf{1 - ||(x+y)/2|| : y in B_X, ||x-y|| >= eps} for a fixed unit x.
double local_modulus_estimate(SpaceRef space, const Vector& x, double eps, std::uint64_t budget,
                              std::uint64_t seed, Vector* witness = nullptr);

// inf{max(||x+z||, ||x-z||) : ||z|| = eps} - 1 for a fixed unit x.
double midpoint_modulus_estimate(SpaceRef space, const Vector& x, double eps, std::uint64_t budget,
                                 std::uint64_t seed, Vector* witness = nullptr);

// inf{1 - <xstar, y> : y in S_X, ||y-x|| >= eps} for a unit x normed by the
// unit dual vector xstar.
double strong_modulus_estimate(SpaceRef space, const Vector& x, const Vector& xstar, double eps,
                               std::uint64_t budget, std::uint64_t seed, Vector* witness = nullptr);

// Whole curve with monotone post-processing (part of the operation
// contract): upper estimates nondecreasing in eps, certified values swept
// to a nondecreasing staircase.
ModulusCurve modulus_curve(SpaceRef space, const std::vector<double>& eps_grid, std::uint64_t budget,
                           std::uint64_t seed, bool want_certified = false,
                           std::uint64_t cert_budget = 40000);

// Branch-and-bound certified lower bound for the modulus of a descriptor
// space (via its surrogate). nullopt when no surrogate with search
// dimension <= 4 exists.
std::optional<double> certified_lower_bound(const NormSpec& space, double eps, std::uint64_t split_budget);

// Search internals shared with the property suites.
struct PairSearchResult {
  double value = 0.0;
  Vector x, y;
};
PairSearchResult search_min_midpoint_deficiency(SpaceRef space, double eps, std::uint64_t budget,
                                                std::uint64_t seed);
double space_dual_norm(SpaceRef space, const Vector& phi);

}  // namespace digeo
