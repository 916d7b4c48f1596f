#pragma once

#include <cstdint>

#include "digeo/direct_integral.hpp"
#include "digeo/geometry.hpp"
#include "digeo/verdict.hpp"

namespace digeo {

// Searches unit pairs with ||x-y|| >= sep_floor maximizing ||x+y||. Fails
// iff a pair with ||x+y|| >= 2 - 1e-9 is found (a flat segment on the
// sphere); the witness pair re-validates by direct norm evaluation.
PropertyVerdict sc_search(SpaceRef space, std::uint64_t budget, std::uint64_t seed,
                          double sep_floor = 1e-3);

// Point conditions of the sublinear operator S(f)(s) = ||f(s)||_s, reduced
// per atom. property must be one of HUDZIK_EXTREME, HUDZIK_STRONG_EXTREME,
// HUDZIK_LUR. Nonzero blocks are tested at the center f_i/||f_i||; zero
// blocks at 3 sampled unit centers (the conditions quantify over the whole
// fiber and a zero block carries no direction).
PropertyVerdict hudzik_point_check(const DirectIntegralSpace& y, const DIVector& f,
                                   PropertyTag property, std::uint64_t budget, std::uint64_t seed);

// Norming-functional face check at a unit f: builds the factored norming
// functional F, measures margin(eps) = inf{1 - <F,g> : g unit, ||g-f|| >= eps}
// over an eps grid, and asserts the decomposition
//   1 - <F,g> = (1 - <g*, S(g)>_E) + sum_i mu_i (||F_i||* ||g_i|| - <F_i,g_i>)
// at the worst witness (both parts nonnegative). In finite dimension weak
// and norm convergence coincide, so a pass certifies the strong and hence
// also the "very" variant of the property.
PropertyVerdict strong_convexity_check(const DirectIntegralSpace& y, const DIVector& f,
                                       std::uint64_t budget, std::uint64_t seed);

}  // namespace digeo
