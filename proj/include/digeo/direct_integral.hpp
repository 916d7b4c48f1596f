#pragma once

#include <cstdint>
#include <vector>

#include "digeo/kothe.hpp"
#include "digeo/space.hpp"
#include "digeo/verdict.hpp"

namespace digeo {

// Y = (direct sum of the fibers X_i, weighted by E): block vectors normed by
// ||f||_Y = || (||f_i||_i)_i ||_E. On a finite atom space this is the whole
// direct-integral construction; the dual is realized concretely as block
// dual vectors.
struct DirectIntegralSpace {
  KotheSpace kothe;
  std::vector<NormSpec> fibers;

  int n_atoms() const { return kothe.n_atoms(); }
  int total_dim() const;
  void validate() const;
};

struct DIVector {
  std::vector<Vector> blocks;
};

struct DIFunctional {
  std::vector<Vector> blocks;  // block i lives in the dual of fiber i
};

void check_shape(const DirectIntegralSpace& y, const std::vector<Vector>& blocks, const char* what);

double di_norm(const DirectIntegralSpace& y, const DIVector& f);

// Pointwise fiber norms (||f_i||_i)_i as an element of E.
ScalarFunction block_norms(const DirectIntegralSpace& y, const DIVector& f);
ScalarFunction dual_block_norms(const DirectIntegralSpace& y, const DIFunctional& f);

// Isometric copy of fiber i: block i carries x scaled by 1/||chi_i||_E so
// that di_norm(result) = ||x||_i.
DIVector embed_fiber(const DirectIntegralSpace& y, int atom, const Vector& x);

// sum_i mu_i <F_i, f_i>
double di_duality_pairing(const DirectIntegralSpace& y, const DIFunctional& bigF, const DIVector& f);

// || (||F_i||_{X_i*})_i ||_{E'}
double di_dual_norm(const DirectIntegralSpace& y, const DIFunctional& bigF);

// Samples f in B_Y (plus coordinate ascent refinement) and checks that the
// best pairing approaches di_dual_norm(F) from below within tol_gap.
PropertyVerdict verify_duality_isometry(const DirectIntegralSpace& y, const DIFunctional& bigF,
                                        std::uint64_t budget, std::uint64_t seed,
                                        double tol_gap = 5e-3);

// For unit f, builds F with di_dual_norm(F) = 1 and pairing(F, f) = 1:
// F_i = g*_i x*_i where g* norms the block-norm function in E' and x*_i
// norms f_i in the fiber dual (arbitrary unit dual vector where f_i = 0).
// Requires E with 1 < p < inf.
DIFunctional construct_norming_functional(const DirectIntegralSpace& y, const DIVector& f);

// h with ||h_i||_i = ||f_i||_i per block and ||h_i - g_i||_i = | ||f_i|| - ||g_i|| |.
DIVector equalize_pointwise_norms(const DirectIntegralSpace& y, const DIVector& f, const DIVector& g);

// Flat coordinate view used by the search kernels.
Vector flatten(const std::vector<Vector>& blocks);
DIVector unflatten(const DirectIntegralSpace& y, const Vector& flat);
DIVector random_unit_vector(const DirectIntegralSpace& y, class Rng& rng);

}  // namespace digeo
