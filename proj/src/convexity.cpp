#include "digeo/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "digeo/config.hpp"
#include "digeo/modulus.hpp"
#include "digeo/parallel.hpp"
#include "digeo/rng.hpp"

namespace digeo {

PropertyVerdict sc_search(SpaceRef space, std::uint64_t budget, std::uint64_t seed, double sep_floor) {
  if (budget < 1) throw std::invalid_argument("sc_search: budget must be >= 1");
  if (!(sep_floor > 0.0)) throw std::invalid_argument("sc_search: sep_floor must be positive");
  PropertyVerdict v;
  v.tag = PropertyTag::SC;
  v.budget = budget;
  v.seed = seed;
  const PairSearchResult best = search_min_midpoint_deficiency(space, sep_floor, budget, seed);
  const double sum_norm = space.norm(add(best.x, best.y));
  v.margin = 2.0 - sum_norm;
  v.witness = {best.x, best.y};
  if (sum_norm >= 2.0 - tols().flat_face) {
    v.status = VerdictStatus::fail;
    v.note = "unit pair with ||x+y|| = " + std::to_string(sum_norm) + " at separation >= " +
             std::to_string(sep_floor);
  } else {
    v.status = VerdictStatus::pass;
    v.note = "best ||x+y|| = " + std::to_string(sum_norm);
  }
  return v;
}

namespace {

// inf over ||z|| = rho of max(|  ||c+z|| - 1 |, | ||c-z|| - 1 |): zero iff
// both c + z and c - z sit on the sphere, i.e. c is not an extreme point.
double extreme_defect(const NormSpec& fiber, const Vector& c, double rho, std::uint64_t budget,
                      std::uint64_t seed, Vector* witness) {
  SpaceRef s(fiber);
  auto objective = [&](const Vector& z) {
    return std::max(std::fabs(s.norm(add(c, z)) - 1.0), std::fabs(s.norm(sub(c, z)) - 1.0));
  };
  auto to_sphere = [&](Vector z) -> Vector {
    const double n = s.norm(z);
    if (n <= 1e-14) return {};
    return scale(z, rho / n);
  };
  const std::size_t n_starts = 16;
  const std::uint64_t per_start = std::max<std::uint64_t>(64, budget / n_starts);
  std::vector<std::pair<double, Vector>> found(n_starts, {std::numeric_limits<double>::infinity(), {}});
  for_each_index(n_starts, [&](std::size_t idx) {
    Rng rng(derive_seed(seed, idx));
    Vector z = to_sphere(rng.gaussian_vector(fiber.dim));
    if (z.empty()) return;
    double val = objective(z);
    std::uint64_t used = 0;
    for (double h = 0.5 * rho; h > 1e-9 * rho && used < per_start; h *= 0.5) {
      bool improved = true;
      while (improved && used < per_start) {
        improved = false;
        for (int j = 0; j < fiber.dim && used < per_start; ++j) {
          const std::size_t k = static_cast<std::size_t>(j);
          for (double delta : {h, -h, -z[k]}) {  // the third move snaps the coordinate to zero
            Vector cand = z;
            cand[k] += delta;
            cand = to_sphere(cand);
            ++used;
            if (cand.empty()) continue;
            const double cv = objective(cand);
            if (cv < val - 1e-15 || (cv <= val && lex_less(cand, z))) {
              val = cv;
              z = cand;
              improved = true;
            }
          }
        }
      }
    }
    found[idx] = {val, z};
  });
  double best = std::numeric_limits<double>::infinity();
  Vector best_z;
  for (const auto& [val, z] : found) {
    if (val < best || (val == best && !z.empty() && (best_z.empty() || lex_less(z, best_z)))) {
      best = val;
      best_z = z;
    }
  }
  if (witness != nullptr) *witness = best_z;
  return best;
}

}  // namespace

PropertyVerdict hudzik_point_check(const DirectIntegralSpace& y, const DIVector& f,
                                   PropertyTag property, std::uint64_t budget, std::uint64_t seed) {
  if (property != PropertyTag::HUDZIK_EXTREME && property != PropertyTag::HUDZIK_STRONG_EXTREME &&
      property != PropertyTag::HUDZIK_LUR)
    throw std::invalid_argument("hudzik_point_check: property must be a HUDZIK_* tag");
  check_shape(y, f.blocks, "hudzik_point_check");

  PropertyVerdict v;
  v.tag = property;
  v.budget = budget;
  v.seed = seed;
  v.status = VerdictStatus::pass;
  v.margin = std::numeric_limits<double>::infinity();

  const std::vector<double> rho_grid{0.1, 0.25, 0.5};
  const int n = y.n_atoms();

  // centers per atom: the normalized block, or 3 sampled unit vectors for a
  // zero block
  std::vector<std::vector<Vector>> centers(static_cast<std::size_t>(n));
  std::size_t n_checks = 0;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double bn = norm_eval(y.fibers[k], f.blocks[k]);
    if (bn > 0.0) {
      centers[k] = {scale(f.blocks[k], 1.0 / bn)};
    } else {
      centers[k] = sphere_sample(y.fibers[k], derive_seed(seed, 0xC0 + k), 3);
    }
    n_checks += centers[k].size() * rho_grid.size();
  }
  const std::uint64_t per_check = std::max<std::uint64_t>(512, budget / std::max<std::size_t>(1, n_checks));

  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const NormSpec& fiber = y.fibers[k];
    for (std::size_t ci = 0; ci < centers[k].size(); ++ci) {
      const Vector& c = centers[k][ci];
      for (std::size_t ri = 0; ri < rho_grid.size(); ++ri) {
        const double rho = rho_grid[ri];
        const std::uint64_t sub_seed = derive_seed(seed, (k << 16) | (ci << 8) | ri);
        Vector z;
        double margin = 0.0;
        if (property == PropertyTag::HUDZIK_EXTREME) {
          margin = extreme_defect(fiber, c, rho, per_check, sub_seed, &z);
        } else if (property == PropertyTag::HUDZIK_STRONG_EXTREME) {
          margin = midpoint_modulus_estimate(SpaceRef(fiber), c, rho, per_check, sub_seed, &z);
        } else {
          margin = local_modulus_estimate(SpaceRef(fiber), c, rho, per_check, sub_seed, &z);
        }
        if (margin < v.margin) {
          v.margin = margin;
          v.witness = {c, z};
          v.note = "atom " + std::to_string(i) + ", rho = " + std::to_string(rho);
        }
      }
    }
  }
  if (v.margin <= tols().flat_face) {
    v.status = VerdictStatus::fail;
    v.note += "; fiber condition degenerate (margin " + std::to_string(v.margin) + ")";
  }
  return v;
}

PropertyVerdict strong_convexity_check(const DirectIntegralSpace& y, const DIVector& f,
                                       std::uint64_t budget, std::uint64_t seed) {
  check_shape(y, f.blocks, "strong_convexity_check");
  const double nf = di_norm(y, f);
  if (std::fabs(nf - 1.0) > tols().pairing_slack)
    throw std::invalid_argument("strong_convexity_check: f must be a unit vector");

  PropertyVerdict v;
  v.tag = PropertyTag::STRONG;
  v.budget = budget;
  v.seed = seed;

  const DIFunctional bigF = construct_norming_functional(y, f);
  SpaceRef s(y);
  const Vector fflat = flatten(f.blocks);
  const Vector Fflat = flatten(bigF.blocks);

  const std::vector<double> eps_grid{0.25, 0.5, 1.0, 1.5, 2.0};
  const std::uint64_t per_eps = std::max<std::uint64_t>(1024, budget / eps_grid.size());
  double worst_margin = std::numeric_limits<double>::infinity();
  Vector worst_g;
  double worst_eps = 0.0;
  for (std::size_t ei = 0; ei < eps_grid.size(); ++ei) {
    Vector g;
    const double m = strong_modulus_estimate(s, fflat, Fflat, eps_grid[ei], per_eps,
                                             derive_seed(seed, 0x5C + ei), &g);
    if (m < worst_margin) {
      worst_margin = m;
      worst_g = g;
      worst_eps = eps_grid[ei];
    }
  }
  v.margin = worst_margin;
  v.witness = {fflat, worst_g};

  // decompose 1 - <F,g> at the worst witness:
  //   1 - <F,g> = (1 - sum_i mu_i ||F_i||* ||g_i||) + sum_i mu_i (||F_i||* ||g_i|| - <F_i,g_i>)
  // the first part is the Koethe-level gap, the rest are alignment defects;
  // each must be nonnegative, so a positive margin pins the witness away
  // from the face of F
  if (!worst_g.empty()) {
    const DIVector g = unflatten(y, worst_g);
    double e_part = 1.0, defects = 0.0, min_term = std::numeric_limits<double>::infinity();
    for (int i = 0; i < y.n_atoms(); ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      const double mu = y.kothe.measure.weights[k];
      const double fn = dual_norm_eval(y.fibers[k], bigF.blocks[k]);
      const double gn = norm_eval(y.fibers[k], g.blocks[k]);
      const double di = mu * (fn * gn - dot(bigF.blocks[k], g.blocks[k]));
      e_part -= mu * fn * gn;
      defects += di;
      min_term = std::min(min_term, di);
    }
    min_term = std::min(min_term, e_part);
    const double total = 1.0 - s.pair(Fflat, worst_g);
    if (min_term < -1e-10 || std::fabs(total - (e_part + defects)) > 1e-9) {
      v.status = VerdictStatus::fail;
      v.note = "norming decomposition violated at witness (koethe gap " + std::to_string(e_part) +
               ", defect sum " + std::to_string(defects) + ", total " + std::to_string(total) + ")";
      return v;
    }
    v.note = "worst eps = " + std::to_string(worst_eps) + ", koethe gap " + std::to_string(e_part) +
             ", defect sum " + std::to_string(defects);
  }

  if (worst_margin <= tols().flat_face) {
    v.status = VerdictStatus::fail;
    v.note += "; face witness with pairing " + std::to_string(1.0 - worst_margin) +
              " at separation >= " + std::to_string(worst_eps);
  } else {
    v.status = VerdictStatus::pass;
  }
  return v;
}

}  // namespace digeo
