#include "digeo/space.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "digeo/config.hpp"
#include "digeo/rng.hpp"

namespace digeo {

namespace {

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& rows) {
  const int m = static_cast<int>(rows.size());
  const int n = m > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw std::invalid_argument("matrix rows have inconsistent lengths");
    for (int j = 0; j < n; ++j) a(i, j) = rows[i][j];
  }
  return a;
}

void check_dim(const NormSpec& s, const Vector& x, const char* what) {
  if (static_cast<int>(x.size()) != s.dim)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " + std::to_string(s.dim) + ")");
  require_finite(x, what);
}

double conjugate_exponent(double p) { return p / (p - 1.0); }

// Vertices of {x : |<a_i,x>| <= 1}: solutions of d active constraints with
// sign choices, kept when feasible. Dimensions here are tiny, so the
// combinatorial enumeration is exact and cheap.
std::vector<Vector> enumerate_ball_vertices(const std::vector<std::vector<double>>& rows, int dim) {
  const int m = static_cast<int>(rows.size());
  std::vector<Vector> verts;
  std::vector<int> idx(static_cast<std::size_t>(dim));
  std::vector<int> comb(static_cast<std::size_t>(dim));
  // iterate over d-subsets of rows
  for (int i = 0; i < dim; ++i) comb[static_cast<std::size_t>(i)] = i;
  const Eigen::MatrixXd a = to_eigen(rows);
  auto emit = [&](const std::vector<int>& subset) {
    Eigen::MatrixXd sub(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) sub(r, c) = a(subset[static_cast<std::size_t>(r)], c);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) return;
    for (unsigned signs = 0; signs < (1u << dim); ++signs) {
      Eigen::VectorXd rhs(dim);
      for (int r = 0; r < dim; ++r) rhs(r) = (signs >> r) & 1u ? -1.0 : 1.0;
      Eigen::VectorXd x = lu.solve(rhs);
      bool feasible = true;
      for (int i = 0; i < m && feasible; ++i) {
        if (std::fabs(a.row(i).dot(x)) > 1.0 + 1e-9) feasible = false;
      }
      if (!feasible) continue;
      Vector v(static_cast<std::size_t>(dim));
      for (int c = 0; c < dim; ++c) v[static_cast<std::size_t>(c)] = x(c);
      bool dup = false;
      for (const auto& w : verts)
        if (linf_dist(w, v) < 1e-10) { dup = true; break; }
      if (!dup) verts.push_back(std::move(v));
    }
  };
  if (m < dim) return verts;
  std::vector<int> subset(static_cast<std::size_t>(dim));
  // simple combination loop
  std::vector<int> c(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    emit(c);
    int i = dim - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == m - dim + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < dim; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  return verts;
}

}  // namespace

void MeasureSpace::validate() const {
  if (weights.empty()) throw std::invalid_argument("measure: n_atoms must be >= 1");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("measure: weights must be strictly positive");
  }
}

NormSpec NormSpec::make_weighted_p(double p, int dim, std::vector<double> w) {
  NormSpec s;
  s.family = NormFamily::weighted_p;
  s.dim = dim;
  s.p = p;
  s.p_inf = false;
  s.weights = w.empty() ? std::vector<double>(static_cast<std::size_t>(dim), 1.0) : std::move(w);
  s.validate();
  return s;
}

NormSpec NormSpec::make_inf(int dim, std::vector<double> w) {
  NormSpec s;
  s.family = NormFamily::weighted_p;
  s.dim = dim;
  s.p_inf = true;
  s.weights = w.empty() ? std::vector<double>(static_cast<std::size_t>(dim), 1.0) : std::move(w);
  s.validate();
  return s;
}

NormSpec NormSpec::make_polyhedral(std::vector<std::vector<double>> rows) {
  NormSpec s;
  s.family = NormFamily::polyhedral;
  s.dim = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  s.functionals = std::move(rows);
  s.validate();
  return s;
}

NormSpec NormSpec::make_ellipsoid(std::vector<std::vector<double>> a) {
  NormSpec s;
  s.family = NormFamily::ellipsoid;
  s.dim = static_cast<int>(a.size());
  s.form = std::move(a);
  s.validate();
  return s;
}

void NormSpec::validate() {
  if (dim < 1) throw std::invalid_argument("dim: must be >= 1");
  switch (family) {
    case NormFamily::weighted_p: {
      if (!p_inf && !(p >= 1.0) )
        throw std::invalid_argument("p: must satisfy p >= 1 or be inf");
      if (static_cast<int>(weights.size()) != dim)
        throw std::invalid_argument("weights: length must equal dim");
      for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w))
          throw std::invalid_argument("weights: must be strictly positive and finite");
      break;
    }
    case NormFamily::polyhedral: {
      if (functionals.empty()) throw std::invalid_argument("functionals: must be nonempty");
      Eigen::MatrixXd a = to_eigen(functionals);
      if (a.cols() != dim) throw std::invalid_argument("functionals: row length must equal dim");
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < dim)
        throw std::invalid_argument("functionals: must have full rank (norm vanishes off origin otherwise)");
      ball_vertices = enumerate_ball_vertices(functionals, dim);
      if (ball_vertices.empty())
        throw std::invalid_argument("functionals: unit ball has no vertices (degenerate description)");
      break;
    }
    case NormFamily::ellipsoid: {
      Eigen::MatrixXd a = to_eigen(form);
      if (a.rows() != dim || a.cols() != dim)
        throw std::invalid_argument("form: must be a dim x dim matrix");
      if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("form: must be symmetric");
      Eigen::LLT<Eigen::MatrixXd> llt(a);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("form: must be positive definite");
      Eigen::MatrixXd inv = a.inverse();
      form_inverse.assign(static_cast<std::size_t>(dim), std::vector<double>(static_cast<std::size_t>(dim)));
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) form_inverse[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = inv(i, j);
      break;
    }
  }
}

std::string NormSpec::family_name() const {
  switch (family) {
    case NormFamily::weighted_p: return "weighted_p";
    case NormFamily::polyhedral: return "polyhedral";
    case NormFamily::ellipsoid: return "ellipsoid";
  }
  return "?";
}

double norm_eval(const NormSpec& s, const Vector& x) {
  check_dim(s, x, "norm_eval");
  switch (s.family) {
    case NormFamily::weighted_p: {
      if (s.p_inf) {
        double m = 0.0;
        for (int i = 0; i < s.dim; ++i)
          m = std::max(m, s.weights[static_cast<std::size_t>(i)] * std::fabs(x[static_cast<std::size_t>(i)]));
        return m;
      }
      if (s.p == 1.0) {
        double acc = 0.0;
        for (int i = 0; i < s.dim; ++i)
          acc += s.weights[static_cast<std::size_t>(i)] * std::fabs(x[static_cast<std::size_t>(i)]);
        return acc;
      }
      if (s.p == 2.0) {
        double acc = 0.0;
        for (int i = 0; i < s.dim; ++i) {
          const double c = x[static_cast<std::size_t>(i)];
          acc += s.weights[static_cast<std::size_t>(i)] * c * c;
        }
        return std::sqrt(acc);
      }
      // scale-out for overflow safety on extreme inputs
      double m = 0.0;
      for (double c : x) m = std::max(m, std::fabs(c));
      if (m == 0.0) return 0.0;
      double acc = 0.0;
      for (int i = 0; i < s.dim; ++i)
        acc += s.weights[static_cast<std::size_t>(i)] *
               std::pow(std::fabs(x[static_cast<std::size_t>(i)]) / m, s.p);
      return m * std::pow(acc, 1.0 / s.p);
    }
    case NormFamily::polyhedral: {
      double best = 0.0;
      for (const auto& row : s.functionals) best = std::max(best, std::fabs(dot(row, x)));
      return best;
    }
    case NormFamily::ellipsoid: {
      double acc = 0.0;
      for (int i = 0; i < s.dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < s.dim; ++j)
          row += s.form[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        acc += x[static_cast<std::size_t>(i)] * row;
      }
      return std::sqrt(std::max(acc, 0.0));
    }
  }
  return 0.0;
}

double dual_norm_eval(const NormSpec& s, const Vector& phi) {
  check_dim(s, phi, "dual_norm_eval");
  switch (s.family) {
    case NormFamily::weighted_p: {
      if (s.p_inf) {  // dual of max_i w_i|x_i| is sum_i |phi_i|/w_i
        double acc = 0.0;
        for (int i = 0; i < s.dim; ++i)
          acc += std::fabs(phi[static_cast<std::size_t>(i)]) / s.weights[static_cast<std::size_t>(i)];
        return acc;
      }
      if (s.p == 1.0) {
        double m = 0.0;
        for (int i = 0; i < s.dim; ++i)
          m = std::max(m, std::fabs(phi[static_cast<std::size_t>(i)]) / s.weights[static_cast<std::size_t>(i)]);
        return m;
      }
      const double q = conjugate_exponent(s.p);
      // || (phi_i w_i^{-1/p}) ||_q
      double m = 0.0;
      std::vector<double> t(static_cast<std::size_t>(s.dim));
      for (int i = 0; i < s.dim; ++i) {
        t[static_cast<std::size_t>(i)] =
            std::fabs(phi[static_cast<std::size_t>(i)]) * std::pow(s.weights[static_cast<std::size_t>(i)], -1.0 / s.p);
        m = std::max(m, t[static_cast<std::size_t>(i)]);
      }
      if (m == 0.0) return 0.0;
      double acc = 0.0;
      for (double c : t) acc += std::pow(c / m, q);
      return m * std::pow(acc, 1.0 / q);
    }
    case NormFamily::polyhedral: {
      double best = 0.0;
      for (const auto& v : s.ball_vertices) best = std::max(best, std::fabs(dot(phi, v)));
      return best;
    }
    case NormFamily::ellipsoid: {
      double acc = 0.0;
      for (int i = 0; i < s.dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < s.dim; ++j)
          row += s.form_inverse[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
        acc += phi[static_cast<std::size_t>(i)] * row;
      }
      return std::sqrt(std::max(acc, 0.0));
    }
  }
  return 0.0;
}

Vector radial_project(const NormSpec& s, const Vector& x) {
  const double n = norm_eval(s, x);
  if (n == 0.0) throw std::invalid_argument("radial_project: zero input");
  return scale(x, 1.0 / n);
}

Vector norming_dual(const NormSpec& s, const Vector& x) {
  check_dim(s, x, "norming_dual");
  const double n = norm_eval(s, x);
  if (n == 0.0) throw std::invalid_argument("norming_dual: zero input");
  Vector phi(static_cast<std::size_t>(s.dim), 0.0);
  switch (s.family) {
    case NormFamily::weighted_p: {
      if (s.p_inf) {
        // concentrate on the first index achieving the max
        for (int i = 0; i < s.dim; ++i) {
          const std::size_t k = static_cast<std::size_t>(i);
          if (s.weights[k] * std::fabs(x[k]) >= n * (1.0 - 1e-15)) {
            phi[k] = (x[k] < 0.0 ? -1.0 : 1.0) * s.weights[k];
            return phi;
          }
        }
        throw std::logic_error("norming_dual: max index not found");
      }
      if (s.p == 1.0) {
        for (int i = 0; i < s.dim; ++i) {
          const std::size_t k = static_cast<std::size_t>(i);
          if (x[k] != 0.0) phi[k] = (x[k] < 0.0 ? -1.0 : 1.0) * s.weights[k];
        }
        // zero entries stay zero: dual norm max_i |phi_i|/w_i = 1, pairing = ||x||
        return phi;
      }
      for (int i = 0; i < s.dim; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const double c = std::fabs(x[k]) / n;
        phi[k] = (x[k] < 0.0 ? -1.0 : 1.0) * s.weights[k] * std::pow(c, s.p - 1.0);
      }
      return phi;
    }
    case NormFamily::polyhedral: {
      for (std::size_t r = 0; r < s.functionals.size(); ++r) {
        const double v = dot(s.functionals[r], x);
        if (std::fabs(v) >= n * (1.0 - 1e-13)) {
          phi = s.functionals[r];
          if (v < 0.0) phi = scale(phi, -1.0);
          // active rows lie on the dual sphere exactly
          return phi;
        }
      }
      throw std::logic_error("norming_dual: no active polyhedral row");
    }
    case NormFamily::ellipsoid: {
      for (int i = 0; i < s.dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < s.dim; ++j)
          row += s.form[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        phi[static_cast<std::size_t>(i)] = row / n;
      }
      return phi;
    }
  }
  return phi;
}

Vector norming_primal(const NormSpec& s, const Vector& phi) {
  check_dim(s, phi, "norming_primal");
  const double dn = dual_norm_eval(s, phi);
  if (dn == 0.0) throw std::invalid_argument("norming_primal: zero input");
  switch (s.family) {
    case NormFamily::weighted_p: {
      Vector x(static_cast<std::size_t>(s.dim), 0.0);
      if (s.p_inf) {
        for (int i = 0; i < s.dim; ++i) {
          const std::size_t k = static_cast<std::size_t>(i);
          x[k] = (phi[k] < 0.0 ? -1.0 : phi[k] > 0.0 ? 1.0 : 1.0) / s.weights[k];
        }
        return x;
      }
      if (s.p == 1.0) {
        for (int i = 0; i < s.dim; ++i) {
          const std::size_t k = static_cast<std::size_t>(i);
          if (std::fabs(phi[k]) / s.weights[k] >= dn * (1.0 - 1e-15)) {
            x[k] = (phi[k] < 0.0 ? -1.0 : 1.0) / s.weights[k];
            return x;
          }
        }
        throw std::logic_error("norming_primal: max index not found");
      }
      const double q = conjugate_exponent(s.p);
      for (int i = 0; i < s.dim; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const double t = std::fabs(phi[k]) / s.weights[k];
        x[k] = (phi[k] < 0.0 ? -1.0 : 1.0) * std::pow(t, q - 1.0);
      }
      return radial_project(s, x);
    }
    case NormFamily::polyhedral: {
      const Vector* best = nullptr;
      double best_v = -std::numeric_limits<double>::infinity();
      double best_sign = 1.0;
      for (const auto& v : s.ball_vertices) {
        const double d = dot(phi, v);
        if (std::fabs(d) > best_v + 1e-15) {
          best_v = std::fabs(d);
          best = &v;
          best_sign = d < 0.0 ? -1.0 : 1.0;
        }
      }
      return scale(*best, best_sign);
    }
    case NormFamily::ellipsoid: {
      Vector x(static_cast<std::size_t>(s.dim), 0.0);
      for (int i = 0; i < s.dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < s.dim; ++j)
          row += s.form_inverse[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * phi[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = row;
      }
      return radial_project(s, x);
    }
  }
  throw std::logic_error("norming_primal: unreachable");
}

Vector sphere_point(const NormSpec& s, Rng& rng) {
  // rotation-invariant direction, then radial projection
  for (;;) {
    Vector g = rng.gaussian_vector(s.dim);
    double e2 = dot(g, g);
    if (e2 > 1e-24) return radial_project(s, g);
  }
}

std::vector<Vector> sphere_sample(const NormSpec& s, std::uint64_t seed, int count) {
  if (count < 1) throw std::invalid_argument("sphere_sample: count must be >= 1");
  std::vector<Vector> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = sphere_point(s, rng);
  }
  return out;
}

double coord_range(const NormSpec& s, int j) {
  Vector e(static_cast<std::size_t>(s.dim), 0.0);
  e[static_cast<std::size_t>(j)] = 1.0;
  return dual_norm_eval(s, e);
}

double inf_lipschitz(const NormSpec& s) {
  double c = 0.0;
  for (int j = 0; j < s.dim; ++j) {
    Vector e(static_cast<std::size_t>(s.dim), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    c += norm_eval(s, e);
  }
  return c;
}

std::optional<NormSpec> certification_surrogate(const NormSpec& s) {
  switch (s.family) {
    case NormFamily::weighted_p: {
      if (s.dim == 1) return s;
      // isometric to standard l^p of the same dim; l^p modulus for dim >= 2
      // equals the 2-dimensional one
      if (s.p_inf) return NormSpec::make_inf(2);
      return NormSpec::make_weighted_p(s.p, 2);
    }
    case NormFamily::ellipsoid:
      return NormSpec::make_euclidean(std::min(s.dim, 2));
    case NormFamily::polyhedral:
      if (s.dim <= 2) return s;
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace digeo
