#pragma once

#include <variant>

#include "digeo/direct_integral.hpp"
#include "digeo/space.hpp"

namespace digeo {

class Rng;

// Uniform handle over a single normed space or a direct integral, exposing
// exactly what the search kernels need on flat coordinate vectors.
class SpaceRef {
 public:
  SpaceRef(const NormSpec& s) : ref_(&s) {}                 // NOLINT(google-explicit-constructor)
  SpaceRef(const DirectIntegralSpace& y) : ref_(&y) {}      // NOLINT(google-explicit-constructor)

  int dim() const;
  double norm(const Vector& x) const;
  Vector project(const Vector& x) const;  // x / ||x||
  Vector sample_sphere(Rng& rng) const;

  // Duality pairing against a flat dual vector: plain dot product for a
  // single space, mu-weighted blockwise dot for a direct integral.
  double pair(const Vector& dual_flat, const Vector& x) const;

  bool is_direct_integral() const { return std::holds_alternative<const DirectIntegralSpace*>(ref_); }
  const NormSpec* as_norm_spec() const;
  const DirectIntegralSpace* as_direct_integral() const;

 private:
  std::variant<const NormSpec*, const DirectIntegralSpace*> ref_;
};

}  // namespace digeo
