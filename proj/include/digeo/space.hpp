#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "digeo/vec.hpp"

namespace digeo {

// Finite atomic measure space: atom i carries weight mu_i > 0.
struct MeasureSpace {
  std::vector<double> weights;

  int n_atoms() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

enum class NormFamily { weighted_p, polyhedral, ellipsoid };

// Descriptor of a finite-dimensional normed space. Norms are closed under
// this descriptor algebra (no user callbacks) so that dual norms, norming
// vectors and Lipschitz constants stay computable.
//
//   weighted_p : ||x|| = (sum_i w_i |x_i|^p)^(1/p),  p in [1, inf)
//                ||x|| = max_i w_i |x_i|,             p = inf (distinct tag)
//   polyhedral : ||x|| = max_i |<a_i, x>| over rows a_i (full rank)
//   ellipsoid  : ||x|| = sqrt(x^T A x), A symmetric positive definite
struct NormSpec {
  NormFamily family = NormFamily::weighted_p;
  int dim = 0;

  double p = 2.0;
  bool p_inf = false;
  std::vector<double> weights;                      // weighted_p
  std::vector<std::vector<double>> functionals;     // polyhedral rows
  std::vector<std::vector<double>> form;            // ellipsoid

  // Derived data filled in by validate().
  std::vector<std::vector<double>> ball_vertices;   // polyhedral unit-ball vertices
  std::vector<std::vector<double>> form_inverse;    // ellipsoid

  static NormSpec make_weighted_p(double p, int dim, std::vector<double> w = {});
  static NormSpec make_inf(int dim, std::vector<double> w = {});
  static NormSpec make_euclidean(int dim) { return make_weighted_p(2.0, dim); }
  static NormSpec make_polyhedral(std::vector<std::vector<double>> rows);
  static NormSpec make_ellipsoid(std::vector<std::vector<double>> a);

  // Checks the descriptor invariants and computes derived data. Throws
  // std::invalid_argument naming the offending field.
  void validate();

  std::string family_name() const;
};

double norm_eval(const NormSpec& space, const Vector& x);

// sup{ <phi, x> : ||x|| <= 1 }. Closed form for weighted_p and ellipsoid;
// for polyhedral a maximum over the unit ball's vertex description.
double dual_norm_eval(const NormSpec& space, const Vector& phi);

Vector radial_project(const NormSpec& space, const Vector& x);

// Unit dual vector attaining <xstar, x> = ||x|| (x != 0). For polyhedral
// spaces maximizers may be non-unique; ties go to the first row in index
// order.
Vector norming_dual(const NormSpec& space, const Vector& x);

// Unit vector attaining <phi, x> = dual_norm(phi) (phi != 0).
Vector norming_primal(const NormSpec& space, const Vector& phi);

std::vector<Vector> sphere_sample(const NormSpec& space, std::uint64_t seed, int count);
Vector sphere_point(const NormSpec& space, class Rng& rng);

// max{ |x_j| : ||x|| <= 1 }  (the dual norm of the j-th coordinate functional).
double coord_range(const NormSpec& space, int j);

// Lipschitz constant of the norm with respect to the sup metric on
// coordinates: |N(u) - N(v)| <= C * max_j |u_j - v_j|.
double inf_lipschitz(const NormSpec& space);

// A lower-dimensional space with the same modulus of convexity, used by the
// certified grid bounds. Weighted-p spaces are isometric to the standard
// l^p of the same dimension (diagonal scaling) and l^p moduli for dim >= 2
// do not depend on the dimension; ellipsoids are isometric to Euclidean.
std::optional<NormSpec> certification_surrogate(const NormSpec& space);

}  // namespace digeo
