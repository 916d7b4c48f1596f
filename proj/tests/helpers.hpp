#pragma once

#include <cmath>
#include <utility>

#include "digeo/direct_integral.hpp"
#include "digeo/rng.hpp"

namespace digeo::testing {

// Brute-force oracle for the Euclidean planar modulus: dense scan over
// sphere angle pairs (the infimum is attained on the sphere by convexity of
// the ball). Independent of the search machinery.
inline double euclid_pair_grid_oracle(double eps, int n = 4000) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  double best = 1.0;
  for (int i = 0; i < n; ++i) {
    const double a = two_pi * i / n;
    const double xc = std::cos(a), xs = std::sin(a);
    for (int j = 0; j < n; ++j) {
      const double b = two_pi * j / n;
      const double yc = std::cos(b), ys = std::sin(b);
      const double dx = xc - yc, dy = xs - ys;
      if (dx * dx + dy * dy < eps * eps) continue;
      const double mx = 0.5 * (xc + yc), my = 0.5 * (xs + ys);
      const double def = 1.0 - std::sqrt(mx * mx + my * my);
      if (def < best) best = def;
    }
  }
  return best;
}

// Unit pair with equal pointwise norms and ||f-g||_Y >= eps. Block norms are
// shared, so ||g||_Y = ||f||_Y = 1 by construction; g = -f is the fallback
// when random directions keep the pair too close.
inline std::pair<DIVector, DIVector> sample_equal_norm_pair(const DirectIntegralSpace& y, double eps,
                                                            Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    DIVector f = random_unit_vector(y, rng);
    DIVector g;
    g.blocks.resize(f.blocks.size());
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
      const double beta = norm_eval(y.fibers[i], f.blocks[i]);
      Vector dir = rng.gaussian_vector(y.fibers[i].dim);
      const double dn = norm_eval(y.fibers[i], dir);
      g.blocks[i] = (beta == 0.0 || dn < 1e-12) ? f.blocks[i] : scale(dir, beta / dn);
    }
    DIVector diff;
    diff.blocks.resize(f.blocks.size());
    for (std::size_t i = 0; i < f.blocks.size(); ++i) diff.blocks[i] = sub(f.blocks[i], g.blocks[i]);
    if (di_norm(y, diff) >= eps) return {f, g};
    for (auto& b : g.blocks) b = scale(b, -1.0);
    DIVector diff2;
    diff2.blocks.resize(f.blocks.size());
    for (std::size_t i = 0; i < f.blocks.size(); ++i)
      diff2.blocks[i] = sub(f.blocks[i], g.blocks[i]);
    if (di_norm(y, diff2) >= eps) return {f, g};
  }
  DIVector f = random_unit_vector(y, rng);
  DIVector g = f;
  for (auto& b : g.blocks) b = scale(b, -1.0);
  return {f, g};  // separation 2
}

}  // namespace digeo::testing
