#include "digeo/kothe.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "digeo/config.hpp"
#include "digeo/rng.hpp"

namespace digeo {

namespace {

void check_len(const KotheSpace& e, const ScalarFunction& f, const char* what) {
  if (static_cast<int>(f.size()) != e.n_atoms())
    throw std::invalid_argument(std::string(what) + ": length mismatch (got " + std::to_string(f.size()) +
                                ", expected " + std::to_string(e.n_atoms()) + ")");
  require_finite(f, what);
}

}  // namespace

void KotheSpace::validate() const {
  measure.validate();
  if (!p_inf && !(p >= 1.0)) throw std::invalid_argument("p: must satisfy p >= 1 or be inf");
  if (!extra_weights.empty()) {
    if (static_cast<int>(extra_weights.size()) != n_atoms())
      throw std::invalid_argument("extra_weights: length must equal n_atoms");
    for (double w : extra_weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("extra_weights: must be strictly positive and finite");
  }
}

KotheSpace KotheSpace::lp(double p, std::vector<double> mu, std::vector<double> extra) {
  KotheSpace e;
  e.measure.weights = std::move(mu);
  e.p = p;
  e.extra_weights = std::move(extra);
  e.validate();
  return e;
}

KotheSpace KotheSpace::linf(std::vector<double> mu, std::vector<double> extra) {
  KotheSpace e;
  e.measure.weights = std::move(mu);
  e.p_inf = true;
  e.extra_weights = std::move(extra);
  e.validate();
  return e;
}

double kothe_norm(const KotheSpace& e, const ScalarFunction& f) {
  check_len(e, f, "kothe_norm");
  const int n = e.n_atoms();
  if (e.p_inf) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, e.extra(i) * std::fabs(f[static_cast<std::size_t>(i)]));
    return m;
  }
  if (e.p == 1.0) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += e.measure.weights[static_cast<std::size_t>(i)] * e.extra(i) * std::fabs(f[static_cast<std::size_t>(i)]);
    return acc;
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = e.extra(i) * std::fabs(f[static_cast<std::size_t>(i)]);
    acc += e.measure.weights[static_cast<std::size_t>(i)] * std::pow(t, e.p);
  }
  return std::pow(acc, 1.0 / e.p);
}

double kothe_dual_norm(const KotheSpace& e, const ScalarFunction& g) {
  check_len(e, g, "kothe_dual_norm");
  const int n = e.n_atoms();
  if (e.p_inf) {  // dual of the sup norm: integral of |g|/e d(mu)
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += e.measure.weights[static_cast<std::size_t>(i)] * std::fabs(g[static_cast<std::size_t>(i)]) / e.extra(i);
    return acc;
  }
  if (e.p == 1.0) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(g[static_cast<std::size_t>(i)]) / e.extra(i));
    return m;
  }
  const double q = e.conjugate();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = std::fabs(g[static_cast<std::size_t>(i)]) / e.extra(i);
    acc += e.measure.weights[static_cast<std::size_t>(i)] * std::pow(t, q);
  }
  return std::pow(acc, 1.0 / q);
}

double kothe_duality_pairing(const KotheSpace& e, const ScalarFunction& f, const ScalarFunction& g) {
  check_len(e, f, "kothe_duality_pairing");
  check_len(e, g, "kothe_duality_pairing");
  double acc = 0.0;
  for (int i = 0; i < e.n_atoms(); ++i)
    acc += e.measure.weights[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
  return acc;
}

ScalarFunction kothe_norming_dual(const KotheSpace& e, const ScalarFunction& f) {
  check_len(e, f, "kothe_norming_dual");
  const int n = e.n_atoms();
  const double nf = kothe_norm(e, f);
  if (nf == 0.0) throw std::invalid_argument("kothe_norming_dual: zero input");
  ScalarFunction g(static_cast<std::size_t>(n), 0.0);
  if (e.p_inf) {
    // mass on the first achieving atom: g_k = sign(f_k) e_k / mu_k
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (e.extra(i) * std::fabs(f[k]) >= nf * (1.0 - 1e-15)) {
        g[k] = (f[k] < 0.0 ? -1.0 : 1.0) * e.extra(i) / e.measure.weights[k];
        return g;
      }
    }
    throw std::logic_error("kothe_norming_dual: max atom not found");
  }
  if (e.p == 1.0) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (f[k] != 0.0) g[k] = (f[k] < 0.0 ? -1.0 : 1.0) * e.extra(i);
    }
    return g;
  }
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double t = e.extra(i) * std::fabs(f[k]) / nf;
    g[k] = (f[k] < 0.0 ? -1.0 : 1.0) * e.extra(i) * std::pow(t, e.p - 1.0);
  }
  return g;
}

ScalarFunction kothe_norming_primal(const KotheSpace& e, const ScalarFunction& g) {
  check_len(e, g, "kothe_norming_primal");
  const int n = e.n_atoms();
  const double dn = kothe_dual_norm(e, g);
  if (dn == 0.0) throw std::invalid_argument("kothe_norming_primal: zero input");
  ScalarFunction f(static_cast<std::size_t>(n), 0.0);
  if (e.p_inf) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      f[k] = (g[k] < 0.0 ? -1.0 : 1.0) / e.extra(i);
    }
    return f;
  }
  if (e.p == 1.0) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      if (std::fabs(g[k]) / e.extra(i) >= dn * (1.0 - 1e-15)) {
        f[k] = (g[k] < 0.0 ? -1.0 : 1.0) /
               (e.measure.weights[k] * e.extra(i));
        return f;
      }
    }
    throw std::logic_error("kothe_norming_primal: max atom not found");
  }
  const double q = e.conjugate();
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double t = std::fabs(g[k]) / e.extra(i);
    f[k] = (g[k] < 0.0 ? -1.0 : 1.0) * std::pow(t, q - 1.0) / (e.extra(i) * 1.0);
  }
  const double nf = kothe_norm(e, f);
  for (auto& c : f) c /= nf;
  return f;
}

double indicator_norm(const KotheSpace& e, int atom) {
  if (atom < 0 || atom >= e.n_atoms()) throw std::invalid_argument("indicator_norm: bad atom index");
  ScalarFunction chi(static_cast<std::size_t>(e.n_atoms()), 0.0);
  chi[static_cast<std::size_t>(atom)] = 1.0;
  return kothe_norm(e, chi);
}

NormSpec as_norm_spec(const KotheSpace& e) {
  const int n = e.n_atoms();
  std::vector<double> w(static_cast<std::size_t>(n));
  if (e.p_inf) {
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = e.extra(i);
    return NormSpec::make_inf(n, std::move(w));
  }
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] = e.measure.weights[static_cast<std::size_t>(i)] * std::pow(e.extra(i), e.p);
  return NormSpec::make_weighted_p(e.p, n, std::move(w));
}

PropertyVerdict check_lattice_monotone(const KotheSpace& e, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("check_lattice_monotone: samples must be >= 1");
  PropertyVerdict v;
  v.tag = PropertyTag::LATTICE_MONOTONE;
  v.budget = static_cast<std::uint64_t>(samples);
  v.seed = seed;
  v.margin = std::numeric_limits<double>::infinity();
  const int n = e.n_atoms();
  for (int k = 0; k < samples; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    ScalarFunction f(static_cast<std::size_t>(n)), g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(i);
      f[j] = rng.normal() * 2.0;
      g[j] = f[j] * rng.uniform(-1.0, 1.0);  // |g| <= |f| pointwise
    }
    const double gap = kothe_norm(e, f) - kothe_norm(e, g);
    v.margin = std::min(v.margin, gap);
    if (gap < -tols().norm_exact) {
      v.status = VerdictStatus::fail;
      v.witness = {f, g};
      v.note = "||g||_E exceeds ||f||_E despite |g| <= |f| pointwise";
      return v;
    }
  }
  v.status = VerdictStatus::pass;
  return v;
}

}  // namespace digeo
