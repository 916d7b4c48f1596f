#include "digeo/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "digeo/config.hpp"
#include "digeo/parallel.hpp"
#include "digeo/rng.hpp"

namespace digeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_eps(double eps, double hi = 2.0) {
  if (!(eps > 0.0) || !(eps <= hi)) throw std::invalid_argument("eps must lie in (0, " + std::to_string(hi) + "]");
}

void require_unit(SpaceRef s, const Vector& x, const char* what) {
  if (std::fabs(s.norm(x) - 1.0) > tols().pairing_slack)
    throw std::invalid_argument(std::string(what) + ": center must have unit norm");
}

// Clamps the pair into the ball and restores the separation constraint by
// expanding about the midpoint. Returns false when no feasible pair was
// reached within the iteration cap.
bool make_pair_feasible(SpaceRef s, double eps, Vector& x, Vector& y) {
  for (int iter = 0; iter < 60; ++iter) {
    double nx = s.norm(x);
    if (nx > 1.0) x = scale(x, 1.0 / nx);
    double ny = s.norm(y);
    if (ny > 1.0) y = scale(y, 1.0 / ny);
    Vector d = sub(x, y);
    const double sep = s.norm(d);
    if (sep >= eps) return true;
    if (sep < 1e-15) return false;
    const Vector m = midpoint(x, y);
    const Vector half = scale(d, 0.5 * eps * (1.0 + 1e-12) / sep);
    x = add(m, half);
    y = sub(m, half);
  }
  return false;
}

bool pair_is_feasible(SpaceRef s, double eps, const Vector& x, const Vector& y, double tol) {
  return s.norm(x) <= 1.0 + tol && s.norm(y) <= 1.0 + tol && s.norm(sub(x, y)) >= eps - tol;
}

double midpoint_deficiency(SpaceRef s, const Vector& x, const Vector& y) {
  return 1.0 - s.norm(midpoint(x, y));
}

struct PairState {
  Vector x, y;
  double value = kInf;
};

void accept_if_better(SpaceRef s, double eps, PairState& st, Vector cx, Vector cy) {
  if (!make_pair_feasible(s, eps, cx, cy)) return;
  const double v = midpoint_deficiency(s, cx, cy);
  if (v < st.value) {
    st.value = v;
    st.x = std::move(cx);
    st.y = std::move(cy);
  }
}

// Snap moves that land exactly on optimal faces: project both points to the
// sphere, and recenter the pair on the projected midpoint (keeps the
// difference, puts the midpoint on the sphere -- exact zeros on flat faces).
void polish_pair(SpaceRef s, double eps, PairState& st) {
  const Vector d = scale(sub(st.x, st.y), 0.5);
  const Vector m = midpoint(st.x, st.y);
  if (s.norm(st.x) > 0.0 && s.norm(st.y) > 0.0)
    accept_if_better(s, eps, st, s.project(st.x), s.project(st.y));
  if (s.norm(m) > 1e-14) {
    const Vector mp = s.project(m);
    Vector cx = add(mp, d);
    Vector cy = sub(mp, d);
    if (pair_is_feasible(s, eps, cx, cy, 0.0)) {
      const double v = midpoint_deficiency(s, cx, cy);
      if (v < st.value) {
        st.value = v;
        st.x = std::move(cx);
        st.y = std::move(cy);
      }
    }
  }
}

PairState run_pair_start(SpaceRef s, double eps, std::uint64_t evals, std::uint64_t start_seed) {
  Rng rng(start_seed);
  const int d = s.dim();
  PairState st;
  {
    Vector x = s.sample_sphere(rng);
    Vector y = s.sample_sphere(rng);
    if (!make_pair_feasible(s, eps, x, y)) {
      x = s.sample_sphere(rng);
      y = scale(x, -1.0);  // separation 2 >= eps always
    }
    st.x = x;
    st.y = y;
    st.value = midpoint_deficiency(s, x, y);
  }
  polish_pair(s, eps, st);

  std::uint64_t used = 0;
  for (double h = 0.5; h > 1e-9 && used < evals; h *= 0.5) {
    bool improved = true;
    while (improved && used < evals) {
      improved = false;
      const double before = st.value;
      for (int j = 0; j < d && used < evals; ++j) {
        const std::size_t k = static_cast<std::size_t>(j);
        for (double delta : {h, -h}) {
          Vector cx = st.x;
          cx[k] += delta;
          accept_if_better(s, eps, st, std::move(cx), st.y);
          Vector cy = st.y;
          cy[k] += delta;
          accept_if_better(s, eps, st, st.x, std::move(cy));
          // paired move: shifts the midpoint, keeps the difference
          Vector px = st.x, py = st.y;
          px[k] += delta;
          py[k] += delta;
          accept_if_better(s, eps, st, std::move(px), std::move(py));
          used += 3;
        }
      }
      if (st.value < before - 1e-18) improved = true;
    }
    polish_pair(s, eps, st);
  }
  polish_pair(s, eps, st);
  return st;
}

// Norming functional for any descriptor or direct integral (the factored
// form exists for every exponent; only its uniqueness needs 1 < p < inf).
Vector space_norming_dual(SpaceRef s, const Vector& x) {
  if (const NormSpec* spec = s.as_norm_spec()) return norming_dual(*spec, x);
  const DirectIntegralSpace* y = s.as_direct_integral();
  const DIVector f = unflatten(*y, x);
  const ScalarFunction beta = block_norms(*y, f);
  const ScalarFunction gs = kothe_norming_dual(y->kothe, beta);
  DIFunctional bigF;
  bigF.blocks.resize(f.blocks.size());
  for (std::size_t i = 0; i < f.blocks.size(); ++i) {
    const NormSpec& fiber = y->fibers[i];
    if (beta[i] > 0.0)
      bigF.blocks[i] = scale(norming_dual(fiber, f.blocks[i]), gs[i]);
    else
      bigF.blocks[i] = Vector(static_cast<std::size_t>(fiber.dim), 0.0);
  }
  return flatten(bigF.blocks);
}

// Flat-face probe: from a unit x, move along a direction annihilated by the
// norming functional. Every point of the chord {x + t d : ||x + t d|| <= 1}
// pairs to 1 with the functional, hence lies on the sphere; if the chord is
// longer than eps it carries a pair whose midpoint deficiency is an exact
// zero. On rotund spaces the chord degenerates and the probe contributes
// nothing.
void face_probe(SpaceRef s, double eps, std::uint64_t seed, PairState& st) {
  Rng rng(seed);
  const Vector x = s.sample_sphere(rng);
  const Vector xs = space_norming_dual(s, x);
  Vector d = rng.gaussian_vector(s.dim());
  d = sub(d, scale(x, s.pair(xs, d)));
  const double dn = s.norm(d);
  if (dn < 1e-12) return;
  d = scale(d, 1.0 / dn);
  auto extent = [&](double sign) {
    double lo = 0.0, hi = 2.0;
    if (s.norm(add(x, scale(d, sign * hi))) <= 1.0) return hi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (s.norm(add(x, scale(d, sign * mid))) <= 1.0)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  };
  const double tp = extent(1.0), tm = extent(-1.0);
  if (tp + tm < eps) return;
  const double a = std::min(tp, std::max(eps - tm, 0.5 * eps));
  const Vector u = add(x, scale(d, a));
  const Vector v = add(x, scale(d, a - eps));
  if (!pair_is_feasible(s, eps, u, v, tols().witness_feasibility)) return;
  const double val = midpoint_deficiency(s, u, v);
  if (val < st.value) {
    st.value = val;
    st.x = u;
    st.y = v;
  }
}

// --- certified lower bound via Lipschitz branch and bound ------------------

struct BBCell {
  Vector lo, hi;     // 2*d coordinates: x block then y block
  double bound = 0.0;
  std::uint64_t id = 0;
};

struct BBCellOrder {
  bool operator()(const BBCell& a, const BBCell& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

struct BBEval {
  double bound = kInf;  // +inf marks pruned-infeasible
  double upper = kInf;  // feasible center value if the center is feasible
};

BBEval evaluate_cell(const NormSpec& s, double eps, double lipschitz, const BBCell& cell) {
  const int d = s.dim;
  Vector cx(static_cast<std::size_t>(d)), cy(static_cast<std::size_t>(d));
  double hx = 0.0, hy = 0.0;
  for (int j = 0; j < d; ++j) {
    const std::size_t k = static_cast<std::size_t>(j);
    cx[k] = 0.5 * (cell.lo[k] + cell.hi[k]);
    cy[k] = 0.5 * (cell.lo[k + static_cast<std::size_t>(d)] + cell.hi[k + static_cast<std::size_t>(d)]);
    hx = std::max(hx, 0.5 * (cell.hi[k] - cell.lo[k]));
    hy = std::max(hy, 0.5 * (cell.hi[k + static_cast<std::size_t>(d)] - cell.lo[k + static_cast<std::size_t>(d)]));
  }
  const double nx = norm_eval(s, cx);
  const double ny = norm_eval(s, cy);
  const double sep = norm_eval(s, sub(cx, cy));
  const double sx = lipschitz * hx, sy = lipschitz * hy;
  BBEval ev;
  if (nx > 1.0 + sx || ny > 1.0 + sy || sep < eps - (sx + sy)) return ev;  // no feasible point inside
  const double value = 1.0 - norm_eval(s, midpoint(cx, cy));
  ev.bound = value - 0.5 * (sx + sy);
  if (nx <= 1.0 && ny <= 1.0 && sep >= eps) ev.upper = value;
  return ev;
}

double certified_lower_on(const NormSpec& s, double eps, std::uint64_t split_budget) {
  const int d = s.dim;
  const double lipschitz = inf_lipschitz(s);
  BBCell root;
  root.lo.resize(static_cast<std::size_t>(2 * d));
  root.hi.resize(static_cast<std::size_t>(2 * d));
  for (int j = 0; j < d; ++j) {
    const double r = coord_range(s, j);
    root.lo[static_cast<std::size_t>(j)] = -r;
    root.hi[static_cast<std::size_t>(j)] = r;
    root.lo[static_cast<std::size_t>(j + d)] = -r;
    root.hi[static_cast<std::size_t>(j + d)] = r;
  }
  std::uint64_t next_id = 0;
  root.id = next_id++;
  {
    const BBEval ev = evaluate_cell(s, eps, lipschitz, root);
    if (ev.bound == kInf) return 1.0;  // feasible set empty
    root.bound = ev.bound;
  }
  std::priority_queue<BBCell, std::vector<BBCell>, BBCellOrder> heap;
  heap.push(root);
  double incumbent = kInf;

  std::uint64_t splits = 0;
  const std::size_t batch = 32;
  while (splits < split_budget && !heap.empty()) {
    if (heap.top().bound >= incumbent - 1e-7) break;  // bound already tight
    std::vector<BBCell> parents;
    while (parents.size() < batch && !heap.empty() && heap.top().bound < incumbent - 1e-7) {
      parents.push_back(heap.top());
      heap.pop();
    }
    if (parents.empty()) break;
    std::vector<BBCell> children(parents.size() * 2);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      const BBCell& p = parents[i];
      // split the widest coordinate
      std::size_t wj = 0;
      double w = -1.0;
      for (std::size_t j = 0; j < p.lo.size(); ++j) {
        const double cw = p.hi[j] - p.lo[j];
        if (cw > w) {
          w = cw;
          wj = j;
        }
      }
      const double mid = 0.5 * (p.lo[wj] + p.hi[wj]);
      BBCell a = p, b = p;
      a.hi[wj] = mid;
      b.lo[wj] = mid;
      a.id = next_id++;
      b.id = next_id++;
      children[2 * i] = std::move(a);
      children[2 * i + 1] = std::move(b);
    }
    std::vector<BBEval> evals(children.size());
    for_each_index(children.size(), [&](std::size_t i) {
      evals[i] = evaluate_cell(s, eps, lipschitz, children[i]);
    });
    for (std::size_t i = 0; i < children.size(); ++i) {
      incumbent = std::min(incumbent, evals[i].upper);
      if (evals[i].bound < kInf) {
        children[i].bound = evals[i].bound;
        heap.push(std::move(children[i]));
      }
    }
    splits += parents.size();
  }
  if (heap.empty()) return std::min(incumbent, 1.0) < kInf ? std::max(0.0, std::min(incumbent, 1.0)) : 1.0;
  return std::max(0.0, heap.top().bound);
}

}  // namespace

std::optional<double> certified_lower_bound(const NormSpec& space, double eps, std::uint64_t split_budget) {
  require_eps(eps);
  const auto surrogate = certification_surrogate(space);
  if (!surrogate) return std::nullopt;
  return certified_lower_on(*surrogate, eps, split_budget);
}

double space_dual_norm(SpaceRef space, const Vector& phi) {
  if (const NormSpec* s = space.as_norm_spec()) return dual_norm_eval(*s, phi);
  const DirectIntegralSpace* y = space.as_direct_integral();
  DIFunctional f;
  f.blocks = unflatten(*y, phi).blocks;
  return di_dual_norm(*y, f);
}

PairSearchResult search_min_midpoint_deficiency(SpaceRef space, double eps, std::uint64_t budget,
                                                std::uint64_t seed) {
  require_eps(eps);
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  const std::size_t n_starts = static_cast<std::size_t>(std::min<std::uint64_t>(64, std::max<std::uint64_t>(1, budget / 64)));
  const std::uint64_t per_start = std::max<std::uint64_t>(64, budget / n_starts);

  std::vector<PairState> results(n_starts);
  for_each_index(n_starts, [&](std::size_t i) {
    results[i] = run_pair_start(space, eps, per_start, derive_seed(seed, i));
  });

  const PairState* best = &results[0];
  for (const auto& r : results) {
    if (r.value < best->value ||
        (r.value == best->value && (lex_less(r.x, best->x) || (r.x == best->x && lex_less(r.y, best->y)))))
      best = &r;
  }
  PairState top = *best;
  for (std::uint64_t probe = 0; probe < 16; ++probe)
    face_probe(space, eps, derive_seed(seed, 0xFACE00 + probe), top);
  return {top.value, top.x, top.y};
}

ModulusPoint global_modulus_estimate(SpaceRef space, double eps, std::uint64_t budget,
                                     std::uint64_t seed, bool want_certified,
                                     std::uint64_t cert_budget) {
  require_eps(eps);
  ModulusPoint pt;
  pt.eps = eps;
  const PairSearchResult r = search_min_midpoint_deficiency(space, eps, budget, seed);
  pt.upper = r.value;
  pt.witness_x = r.x;
  pt.witness_y = r.y;
  if (want_certified) {
    if (const NormSpec* s = space.as_norm_spec()) {
      if (auto lo = certified_lower_bound(*s, eps, cert_budget)) pt.certified = *lo;
    }
  }
  return pt;
}

ModulusCurve modulus_curve(SpaceRef space, const std::vector<double>& eps_grid, std::uint64_t budget,
                           std::uint64_t seed, bool want_certified, std::uint64_t cert_budget) {
  ModulusCurve curve;
  curve.budget = budget;
  curve.seed = seed;
  curve.eps = eps_grid;
  const std::size_t n = eps_grid.size();
  curve.upper.resize(n);
  curve.witnesses.resize(n);
  bool all_certified = want_certified;
  std::vector<std::optional<double>> cert(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ModulusPoint pt =
        global_modulus_estimate(space, eps_grid[i], budget, derive_seed(seed, 0xC0FFEE + i), want_certified, cert_budget);
    curve.upper[i] = pt.upper;
    curve.witnesses[i] = {pt.witness_x, pt.witness_y};
    cert[i] = pt.certified;
    if (!pt.certified) all_certified = false;
  }
  // nondecreasing upper envelope: a feasible pair for a larger eps is
  // feasible for every smaller one
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = i - 1;
    if (curve.upper[j] > curve.upper[i]) {
      curve.upper[j] = curve.upper[i];
      curve.witnesses[j] = curve.witnesses[i];
    }
  }
  if (all_certified && n > 0) {
    curve.certified.resize(n);
    for (std::size_t i = 0; i < n; ++i) curve.certified[i] = std::max(0.0, *cert[i]);
    for (std::size_t i = 1; i < n; ++i) curve.certified[i] = std::max(curve.certified[i], curve.certified[i - 1]);
    // a certified lower bound can never exceed the witnessed upper value
    for (std::size_t i = 0; i < n; ++i) curve.certified[i] = std::min(curve.certified[i], curve.upper[i]);
  }
  return curve;
}

double ModulusCurve::eval_linear(double e) const {
  const auto& v = upper;
  if (eps.empty()) return 0.0;
  if (e <= 0.0) return 0.0;
  if (e <= eps.front()) return v.front() * (e / eps.front());
  if (e >= eps.back()) return v.back();
  const auto it = std::upper_bound(eps.begin(), eps.end(), e);
  const std::size_t i = static_cast<std::size_t>(it - eps.begin());
  const double t = (e - eps[i - 1]) / (eps[i] - eps[i - 1]);
  return v[i - 1] + t * (v[i] - v[i - 1]);
}

double ModulusCurve::eval_step_lower(double e) const {
  const auto& v = bound_series();
  if (eps.empty() || e < eps.front()) return 0.0;
  const auto it = std::upper_bound(eps.begin(), eps.end(), e);
  return v[static_cast<std::size_t>(it - eps.begin()) - 1];
}

// --- single-vector searches ------------------------------------------------

namespace {

struct VecState {
  Vector v;
  double value = kInf;
};

template <class Feasibilize, class Objective>
VecState run_vec_start(SpaceRef s, std::uint64_t evals, std::uint64_t start_seed, const Vector& init,
                       Feasibilize&& feas, Objective&& obj) {
  const int d = s.dim();
  VecState st;
  st.v = init;
  if (!feas(st.v)) return st;
  st.value = obj(st.v);
  std::uint64_t used = 0;
  auto try_candidate = [&](Vector cand) {
    if (!feas(cand)) return false;
    const double val = obj(cand);
    if (val < st.value) {
      st.value = val;
      st.v = std::move(cand);
      return true;
    }
    return false;
  };
  for (double h = 0.5; h > 1e-9 && used < evals; h *= 0.5) {
    bool improved = true;
    while (improved && used < evals) {
      improved = false;
      for (int j = 0; j < d && used < evals; ++j) {
        for (double delta : {h, -h}) {
          Vector cand = st.v;
          cand[static_cast<std::size_t>(j)] += delta;
          if (try_candidate(std::move(cand))) improved = true;
          ++used;
        }
      }
    }
  }
  return st;
}

template <class MakeInit, class Feasibilize, class Objective>
VecState multistart_vec_min(SpaceRef s, std::uint64_t budget, std::uint64_t seed, MakeInit&& init,
                            Feasibilize&& feas, Objective&& obj,
                            const std::vector<Vector>& extra_inits = {}) {
  const std::size_t n_starts = static_cast<std::size_t>(std::min<std::uint64_t>(48, std::max<std::uint64_t>(1, budget / 64)));
  const std::uint64_t per_start = std::max<std::uint64_t>(64, budget / n_starts);
  const std::size_t total = n_starts + extra_inits.size();
  std::vector<VecState> results(total);
  for_each_index(total, [&](std::size_t i) {
    Vector v0;
    if (i < n_starts) {
      Rng rng(derive_seed(seed, i));
      v0 = init(rng);
    } else {
      v0 = extra_inits[i - n_starts];
    }
    results[i] = run_vec_start(s, per_start, derive_seed(seed, i), v0, feas, obj);
  });
  const VecState* best = &results[0];
  for (const auto& r : results)
    if (r.value < best->value || (r.value == best->value && lex_less(r.v, best->v))) best = &r;
  return *best;
}

}  // namespace

double local_modulus_estimate(SpaceRef space, const Vector& x, double eps, std::uint64_t budget,
                              std::uint64_t seed, Vector* witness) {
  require_eps(eps);
  require_unit(space, x, "local_modulus_estimate");
  auto feas = [&](Vector& y) {
    for (int iter = 0; iter < 60; ++iter) {
      const double ny = space.norm(y);
      if (ny > 1.0) y = scale(y, 1.0 / ny);
      const Vector d = sub(y, x);
      const double sep = space.norm(d);
      if (sep >= eps) return true;
      if (sep < 1e-15) return false;
      y = add(x, scale(d, eps * (1.0 + 1e-12) / sep));
    }
    return false;
  };
  auto obj = [&](const Vector& y) { return 1.0 - space.norm(midpoint(x, y)); };
  VecState best = multistart_vec_min(
      space, budget, seed, [&](Rng& rng) { return space.sample_sphere(rng); }, feas, obj,
      {scale(x, -1.0)});
  // face snap: recenter the midpoint on the sphere while keeping x fixed;
  // exact on flat faces through x
  const Vector m = midpoint(x, best.v);
  if (space.norm(m) > 1e-14) {
    Vector y2 = sub(scale(space.project(m), 2.0), x);
    if (space.norm(y2) <= 1.0 && space.norm(sub(y2, x)) >= eps) {
      const double v2 = obj(y2);
      if (v2 < best.value) {
        best.value = v2;
        best.v = std::move(y2);
      }
    }
  }
  if (witness) *witness = best.v;
  return best.value;
}

double midpoint_modulus_estimate(SpaceRef space, const Vector& x, double eps, std::uint64_t budget,
                                 std::uint64_t seed, Vector* witness) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  require_unit(space, x, "midpoint_modulus_estimate");
  auto feas = [&](Vector& z) {
    const double nz = space.norm(z);
    if (nz < 1e-15) return false;
    z = scale(z, eps / nz);
    return true;
  };
  auto obj = [&](const Vector& z) {
    return std::max(space.norm(add(x, z)), space.norm(sub(x, z))) - 1.0;
  };
  VecState best = multistart_vec_min(
      space, budget, seed, [&](Rng& rng) { return scale(space.sample_sphere(rng), eps); }, feas, obj);
  if (witness) *witness = best.v;
  return best.value;
}

double strong_modulus_estimate(SpaceRef space, const Vector& x, const Vector& xstar, double eps,
                               std::uint64_t budget, std::uint64_t seed, Vector* witness) {
  require_eps(eps);
  require_unit(space, x, "strong_modulus_estimate");
  if (std::fabs(space.pair(xstar, x) - 1.0) > tols().pairing_slack ||
      std::fabs(space_dual_norm(space, xstar) - 1.0) > tols().pairing_slack)
    throw std::invalid_argument("strong_modulus_estimate: xstar must be a unit dual vector norming x");
  auto feas = [&](Vector& y) {
    for (int iter = 0; iter < 60; ++iter) {
      const double ny = space.norm(y);
      if (ny < 1e-15) return false;
      y = scale(y, 1.0 / ny);
      const Vector d = sub(y, x);
      const double sep = space.norm(d);
      if (sep >= eps) return true;
      if (sep < 1e-15) return false;
      y = add(x, scale(d, eps * (1.0 + 1e-12) / sep));
    }
    return false;
  };
  auto obj = [&](const Vector& y) { return 1.0 - space.pair(xstar, y); };
  VecState best = multistart_vec_min(
      space, budget, seed, [&](Rng& rng) { return space.sample_sphere(rng); }, feas, obj,
      {scale(x, -1.0)});
  if (witness) *witness = best.v;
  return best.value;
}

}  // namespace digeo
