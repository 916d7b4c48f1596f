#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "digeo/kothe.hpp"
#include "digeo/rng.hpp"

using namespace digeo;

namespace {

// sampled sup of the pairing over the unit ball, independent of the closed
// conjugate form
double sampled_dual(const KotheSpace& e, const ScalarFunction& g, int n = 20000) {
  Rng rng(5);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    ScalarFunction f = rng.gaussian_vector(e.n_atoms());
    for (auto& v : f) v = std::fabs(v);
    const double nf = kothe_norm(e, f);
    if (nf < 1e-12) continue;
    double acc = 0.0;
    for (int j = 0; j < e.n_atoms(); ++j) {
      const std::size_t k = static_cast<std::size_t>(j);
      acc += e.measure.weights[k] * f[k] * std::fabs(g[k]);
    }
    best = std::max(best, acc / nf);
  }
  return best;
}

}  // namespace

TEST_CASE("norm values by hand") {
  const KotheSpace e1 = KotheSpace::lp(1.0, {2.0, 1.0});
  CHECK(kothe_norm(e1, {1.0, 1.0}) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(kothe_dual_norm(e1, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));

  const KotheSpace e2 = KotheSpace::lp(2.0, {1.0, 4.0});
  CHECK(kothe_norm(e2, {1.0, 0.5}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const KotheSpace einf = KotheSpace::linf({1.0, 1.0}, {2.0, 1.0});
  CHECK(kothe_norm(einf, {1.0, 1.5}) == doctest::Approx(2.0).epsilon(1e-12));
  // dual of sup with extra weight: integral against the reciprocal weight
  CHECK(kothe_dual_norm(einf, {1.0, 1.0}) == doctest::Approx(0.5 + 1.0).epsilon(1e-12));
}

TEST_CASE("closed-form dual matches the sampled sup and is attained") {
  Rng rng(23);
  for (KotheSpace e : {KotheSpace::lp(1.5, {1.0, 2.0, 0.5}), KotheSpace::lp(1.0, {2.0, 1.0}),
                       KotheSpace::lp(3.0, {1.0, 1.0, 2.0}, {1.0, 0.5, 2.0}),
                       KotheSpace::linf({1.0, 2.0})}) {
    for (int t = 0; t < 5; ++t) {
      ScalarFunction g = rng.gaussian_vector(e.n_atoms());
      const double dn = kothe_dual_norm(e, g);
      CHECK(sampled_dual(e, g, 8000) <= dn + 1e-9);
      const ScalarFunction f = kothe_norming_primal(e, g);
      CHECK(kothe_norm(e, f) == doctest::Approx(1.0).epsilon(1e-11));
      CHECK(kothe_duality_pairing(e, f, g) == doctest::Approx(dn).epsilon(1e-11));
    }
  }
}

TEST_CASE("norming duals and Hoelder") {
  Rng rng(29);
  for (KotheSpace e : {KotheSpace::lp(2.5, {1.0, 0.5, 2.0}), KotheSpace::lp(1.0, {1.0, 3.0}),
                       KotheSpace::linf({2.0, 1.0})}) {
    for (int t = 0; t < 20; ++t) {
      ScalarFunction f = rng.gaussian_vector(e.n_atoms());
      ScalarFunction g = rng.gaussian_vector(e.n_atoms());
      CHECK(std::fabs(kothe_duality_pairing(e, f, g)) <=
            kothe_norm(e, f) * kothe_dual_norm(e, g) + 1e-9);
      const ScalarFunction gs = kothe_norming_dual(e, f);
      CHECK(kothe_duality_pairing(e, f, gs) == doctest::Approx(kothe_norm(e, f)).epsilon(1e-11));
      CHECK(kothe_dual_norm(e, gs) == doctest::Approx(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("double conjugate restores the norm") {
  Rng rng(31);
  const KotheSpace e = KotheSpace::lp(1.7, {1.0, 2.0, 0.5}, {1.0, 1.5, 0.75});
  for (int t = 0; t < 50; ++t) {
    ScalarFunction f = rng.gaussian_vector(3);
    // dual of the dual via sampled sup over the dual ball
    double best = 0.0;
    Rng inner(derive_seed(31, static_cast<std::uint64_t>(t)));
    for (int i = 0; i < 3000; ++i) {
      ScalarFunction g = inner.gaussian_vector(3);
      const double dn = kothe_dual_norm(e, g);
      if (dn < 1e-12) continue;
      best = std::max(best, std::fabs(kothe_duality_pairing(e, f, g)) / dn);
    }
    CHECK(best <= kothe_norm(e, f) + 1e-9);
    CHECK(best >= 0.95 * kothe_norm(e, f));
  }
}

TEST_CASE("indicator norms and the NormSpec view") {
  const KotheSpace e = KotheSpace::lp(3.0, {2.0, 1.0}, {1.0, 0.5});
  CHECK(indicator_norm(e, 0) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  CHECK(indicator_norm(e, 1) == doctest::Approx(0.5).epsilon(1e-12));

  const NormSpec view = as_norm_spec(e);
  Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    ScalarFunction f = rng.gaussian_vector(2);
    CHECK(norm_eval(view, f) == doctest::Approx(kothe_norm(e, f)).epsilon(1e-12));
  }
  const NormSpec vinf = as_norm_spec(KotheSpace::linf({2.0, 1.0}, {1.0, 3.0}));
  for (int t = 0; t < 50; ++t) {
    ScalarFunction f = rng.gaussian_vector(2);
    CHECK(norm_eval(vinf, f) ==
          doctest::Approx(kothe_norm(KotheSpace::linf({2.0, 1.0}, {1.0, 3.0}), f)).epsilon(1e-12));
  }
}

TEST_CASE("lattice monotonicity holds on sampled dominated pairs") {
  for (KotheSpace e : {KotheSpace::lp(1.0, {1.0, 2.0}), KotheSpace::lp(2.5, {1.0, 0.5, 2.0}),
                       KotheSpace::linf({1.0, 1.0, 1.0})}) {
    const PropertyVerdict v = check_lattice_monotone(e, 2000, 101);
    CHECK(v.passed());
    CHECK(v.margin >= 0.0);
  }
}

TEST_CASE("validation rejects bad lattices") {
  CHECK_THROWS_AS(KotheSpace::lp(0.9, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(KotheSpace::lp(2.0, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(KotheSpace::lp(2.0, {1.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(KotheSpace::lp(2.0, {}), std::invalid_argument);
}
