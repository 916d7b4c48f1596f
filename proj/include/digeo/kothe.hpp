#pragma once

#include <cstdint>
#include <vector>

#include "digeo/space.hpp"
#include "digeo/verdict.hpp"

namespace digeo {

// Weighted l^p lattice norm on scalar functions over the atoms:
//
//   p < inf : ||f||_E = (sum_i mu_i (e_i |f_i|)^p)^(1/p)
//   p = inf : ||f||_E = max_i e_i |f_i|
//
// e is an optional extra weight (default 1), composed with mu so that p = 1
// reproduces the integral of |f| d(mu). The Koethe dual is again of this
// family with the conjugate exponent and reciprocal extra weight.
struct KotheSpace {
  MeasureSpace measure;
  double p = 2.0;
  bool p_inf = false;
  std::vector<double> extra_weights;  // empty means all ones

  int n_atoms() const { return measure.n_atoms(); }
  double extra(int i) const { return extra_weights.empty() ? 1.0 : extra_weights[static_cast<std::size_t>(i)]; }
  double conjugate() const { return p / (p - 1.0); }
  void validate() const;

  static KotheSpace lp(double p, std::vector<double> mu, std::vector<double> extra = {});
  static KotheSpace linf(std::vector<double> mu, std::vector<double> extra = {});
};

using ScalarFunction = Vector;  // one value per atom

double kothe_norm(const KotheSpace& e, const ScalarFunction& f);

// sup{ integral of |f g| d(mu) : f in B_E }, closed form via the conjugate
// exponent. kothe_dual_norm_sampled in the tests cross-validates it.
double kothe_dual_norm(const KotheSpace& e, const ScalarFunction& g);

// integral of f g d(mu) = sum_i mu_i f_i g_i
double kothe_duality_pairing(const KotheSpace& e, const ScalarFunction& f, const ScalarFunction& g);

// g* on the dual sphere with pairing(f, g*) = ||f||_E (f != 0).
ScalarFunction kothe_norming_dual(const KotheSpace& e, const ScalarFunction& f);

// f* in B_E attaining the dual norm of g (g != 0).
ScalarFunction kothe_norming_primal(const KotheSpace& e, const ScalarFunction& g);

double indicator_norm(const KotheSpace& e, int atom);

// The same norm as a NormSpec over the atoms (used by the modulus machinery).
NormSpec as_norm_spec(const KotheSpace& e);

// Samples pairs with |g| <= |f| pointwise and checks the lattice axiom
// ||g||_E <= ||f||_E. Returns the witness pair on failure.
PropertyVerdict check_lattice_monotone(const KotheSpace& e, int samples, std::uint64_t seed);

}  // namespace digeo
