#include "digeo/geometry.hpp"

#include <stdexcept>

#include "digeo/rng.hpp"

namespace digeo {

int SpaceRef::dim() const {
  if (auto* s = std::get_if<const NormSpec*>(&ref_)) return (*s)->dim;
  return std::get<const DirectIntegralSpace*>(ref_)->total_dim();
}

double SpaceRef::norm(const Vector& x) const {
  if (auto* s = std::get_if<const NormSpec*>(&ref_)) return norm_eval(**s, x);
  const auto* y = std::get<const DirectIntegralSpace*>(ref_);
  return di_norm(*y, unflatten(*y, x));
}

Vector SpaceRef::project(const Vector& x) const {
  const double n = norm(x);
  if (n == 0.0) throw std::invalid_argument("SpaceRef::project: zero input");
  return scale(x, 1.0 / n);
}

Vector SpaceRef::sample_sphere(Rng& rng) const {
  for (;;) {
    Vector g = rng.gaussian_vector(dim());
    if (norm(g) > 1e-12) return project(g);
  }
}

double SpaceRef::pair(const Vector& dual_flat, const Vector& x) const {
  if (std::holds_alternative<const NormSpec*>(ref_)) return dot(dual_flat, x);
  const auto* y = std::get<const DirectIntegralSpace*>(ref_);
  DIVector f = unflatten(*y, x);
  DIVector bigF = unflatten(*y, dual_flat);
  double acc = 0.0;
  for (int i = 0; i < y->n_atoms(); ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    acc += y->kothe.measure.weights[k] * dot(bigF.blocks[k], f.blocks[k]);
  }
  return acc;
}

const NormSpec* SpaceRef::as_norm_spec() const {
  if (auto* s = std::get_if<const NormSpec*>(&ref_)) return *s;
  return nullptr;
}

const DirectIntegralSpace* SpaceRef::as_direct_integral() const {
  if (auto* y = std::get_if<const DirectIntegralSpace*>(&ref_)) return *y;
  return nullptr;
}

}  // namespace digeo
