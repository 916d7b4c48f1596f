#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "digeo/rng.hpp"
#include "digeo/space.hpp"

using namespace digeo;

namespace {

// dense directional scan, independent of the closed forms
double sampled_dual_norm(const NormSpec& s, const Vector& phi, int n = 20000) {
  double best = 0.0;
  Rng rng(7);
  for (int i = 0; i < n; ++i) {
    Vector x = rng.gaussian_vector(s.dim);
    const double nx = norm_eval(s, x);
    if (nx < 1e-12) continue;
    best = std::max(best, std::fabs(dot(phi, x)) / nx);
  }
  return best;
}

}  // namespace

TEST_CASE("weighted p norms match hand values") {
  NormSpec s = NormSpec::make_weighted_p(3.0, 2, {2.0, 1.0});
  CHECK(norm_eval(s, {1.0, -2.0}) == doctest::Approx(std::cbrt(10.0)).epsilon(1e-12));

  NormSpec e = NormSpec::make_euclidean(3);
  CHECK(norm_eval(e, {3.0, 4.0, 0.0}) == doctest::Approx(5.0).epsilon(1e-12));

  NormSpec one = NormSpec::make_weighted_p(1.0, 2, {1.0, 3.0});
  CHECK(norm_eval(one, {-2.0, 1.0}) == doctest::Approx(5.0).epsilon(1e-12));

  NormSpec inf = NormSpec::make_inf(2, {1.0, 2.0});
  CHECK(norm_eval(inf, {3.0, -2.0}) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("polyhedral and ellipsoid norms") {
  NormSpec hex = NormSpec::make_polyhedral({{1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}, {-0.5, std::sqrt(3.0) / 2.0}});
  CHECK(norm_eval(hex, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hex.ball_vertices.size() == 6);
  for (const auto& v : hex.ball_vertices) CHECK(norm_eval(hex, v) == doctest::Approx(1.0).epsilon(1e-9));

  NormSpec ell = NormSpec::make_ellipsoid({{2.0, 0.5}, {0.5, 1.0}});
  const Vector x{1.0, -1.0};
  CHECK(norm_eval(ell, x) == doctest::Approx(std::sqrt(2.0 - 1.0 + 1.0)).epsilon(1e-12));
}

TEST_CASE("dual norms agree with a sampled sup and are attained") {
  Rng rng(11);
  for (NormSpec s : {NormSpec::make_weighted_p(1.5, 3, {1.0, 2.0, 0.5}),
                     NormSpec::make_weighted_p(1.0, 2, {2.0, 1.0}), NormSpec::make_inf(2, {1.0, 3.0}),
                     NormSpec::make_ellipsoid({{2.0, 0.5}, {0.5, 1.0}}),
                     NormSpec::make_polyhedral({{1.0, 0.25}, {0.0, 1.0}})}) {
    for (int t = 0; t < 5; ++t) {
      Vector phi = rng.gaussian_vector(s.dim);
      const double dn = dual_norm_eval(s, phi);
      CHECK(sampled_dual_norm(s, phi) <= dn + 1e-9);
      const Vector attain = norming_primal(s, phi);
      CHECK(norm_eval(s, attain) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(dot(phi, attain) == doctest::Approx(dn).epsilon(1e-12));
    }
  }
}

TEST_CASE("norming duals attain the norm with unit dual norm") {
  Rng rng(13);
  for (NormSpec s : {NormSpec::make_weighted_p(4.0, 3), NormSpec::make_weighted_p(1.0, 2),
                     NormSpec::make_inf(3), NormSpec::make_ellipsoid({{1.5, -0.25}, {-0.25, 1.0}}),
                     NormSpec::make_polyhedral({{1.0, 0.0}, {0.3, 0.9}})}) {
    for (int t = 0; t < 5; ++t) {
      Vector x = rng.gaussian_vector(s.dim);
      const Vector xs = norming_dual(s, x);
      CHECK(dot(xs, x) == doctest::Approx(norm_eval(s, x)).epsilon(1e-12));
      CHECK(dual_norm_eval(s, xs) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("radial projection and sphere samples are unit") {
  const NormSpec s = NormSpec::make_weighted_p(4.0, 3, {1.0, 0.5, 2.0});
  for (const Vector& v : sphere_sample(s, 21, 50)) CHECK(norm_eval(s, v) == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(3);
  Vector x = rng.gaussian_vector(3);
  CHECK(norm_eval(s, radial_project(s, x)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inf lipschitz bounds norm differences") {
  Rng rng(17);
  for (NormSpec s : {NormSpec::make_weighted_p(3.0, 3, {1.0, 2.0, 0.5}),
                     NormSpec::make_polyhedral({{1.0, 0.5}, {-0.25, 1.0}}),
                     NormSpec::make_ellipsoid({{2.0, 0.5}, {0.5, 1.0}})}) {
    const double c = inf_lipschitz(s);
    for (int t = 0; t < 200; ++t) {
      Vector u = rng.gaussian_vector(s.dim), v = rng.gaussian_vector(s.dim);
      CHECK(std::fabs(norm_eval(s, u) - norm_eval(s, v)) <= c * linf_dist(u, v) + 1e-12);
    }
    for (int j = 0; j < s.dim; ++j) {
      Vector phi(static_cast<std::size_t>(s.dim), 0.0);
      phi[static_cast<std::size_t>(j)] = 1.0;
      CHECK(coord_range(s, j) == doctest::Approx(dual_norm_eval(s, phi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("certification surrogates preserve the norm family geometry") {
  const auto s4 = certification_surrogate(NormSpec::make_weighted_p(4.0, 3, {2.0, 1.0, 0.5}));
  REQUIRE(s4.has_value());
  CHECK(s4->dim == 2);
  CHECK(s4->p == doctest::Approx(4.0));

  const auto ell = certification_surrogate(NormSpec::make_ellipsoid({{2.0, 0.5}, {0.5, 1.0}}));
  REQUIRE(ell.has_value());
  CHECK(ell->family == NormFamily::weighted_p);
  CHECK(ell->p == doctest::Approx(2.0));

  CHECK_FALSE(certification_surrogate(
                  NormSpec::make_polyhedral({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}))
                  .has_value());
}

TEST_CASE("descriptor validation rejects malformed input") {
  CHECK_THROWS_AS(NormSpec::make_weighted_p(0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::make_weighted_p(2.0, 2, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(NormSpec::make_ellipsoid({{1.0, 2.0}, {2.0, 1.0}}), std::invalid_argument);  // not SPD
  CHECK_THROWS_AS(NormSpec::make_polyhedral({{1.0, 0.0}}), std::invalid_argument);  // rank deficient
  MeasureSpace m{{1.0, 0.0}};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
