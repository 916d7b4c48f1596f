#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "digeo/day_bound.hpp"
#include "digeo/io.hpp"
#include "helpers.hpp"

using namespace digeo;

namespace {

ModulusCurve synthetic_curve(std::vector<double> eps, std::vector<double> values) {
  ModulusCurve c;
  c.eps = std::move(eps);
  c.upper = values;
  c.certified = std::move(values);
  c.witnesses.resize(c.eps.size());
  return c;
}

}  // namespace

TEST_CASE("composition formulas on synthetic curves") {
  // delta(e) = e/4 on both inputs, dense enough that no query extrapolates
  std::vector<double> grid, vals;
  for (double e = 0.01; e <= 2.0; e += 0.01) {
    grid.push_back(e);
    vals.push_back(e / 4.0);
  }
  const ModulusCurve c = synthetic_curve(grid, vals);
  const double eps = 1.0;
  const DayBoundReport r = compose_day_bound(c, c, eps);
  const double eta = std::min(0.5, eps / 16.0);                   // delta(eps/4)
  const double alpha = 3.0 * eta * eps / 16.0;                    // delta(3 eta eps/4)
  const double omega = std::min(eps, 2.0 * alpha) / 2.0;
  const double slack = std::min(1e-6, alpha / 4.0);
  CHECK(r.eta == doctest::Approx(eta).epsilon(1e-12));
  CHECK(r.alpha == doctest::Approx(alpha).epsilon(1e-9));
  CHECK(r.omega == doctest::Approx(omega).epsilon(1e-9));
  CHECK(r.tau == doctest::Approx(std::min(omega / 4.0, alpha - omega / 2.0 - slack)).epsilon(1e-6));
  CHECK(r.tau > 0.0);
  CHECK_FALSE(r.vacuous);
  CHECK(r.conclusion_separation == doctest::Approx(2.0 * eps));

  // degenerate fiber curve: eta = 0 forces a vacuous report
  const ModulusCurve flat = synthetic_curve({0.5, 1.0, 2.0}, {0.0, 0.0, 0.0});
  const DayBoundReport rv = compose_day_bound(c, flat, eps);
  CHECK(rv.vacuous);
  CHECK(rv.tau <= 0.0);

  CHECK_THROWS_AS(compose_day_bound(c, c, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(compose_day_bound(c, c, 0.0), std::invalid_argument);
}

TEST_CASE("pipeline produces a positive bound on a smooth configuration") {
  const DirectIntegralSpace y = fixture("day_p2_a");
  const DayPipelineResult pipe = day_bound_pipeline(y, 0.5, 20000, 3);
  CHECK(pipe.report.tau > 0.0);
  CHECK_FALSE(pipe.report.vacuous);
  CHECK(pipe.report.omega == doctest::Approx(std::min(0.5, 2.0 * pipe.report.alpha) / 2.0));
  CHECK(pipe.report.eta <= 0.5);
  CHECK(pipe.delta_fibers.size() > 0);
  CHECK(pipe.delta_e.size() > 0);

  const PropertyVerdict v = verify_day_bound(y, pipe.report, 20000, 5);
  CHECK(v.passed());
}

TEST_CASE("witness traces satisfy the proof inequalities") {
  const DirectIntegralSpace y = fixture("day_p15_a");
  const DayPipelineResult pipe = day_bound_pipeline(y, 0.5, 15000, 9);
  Rng rng(71);
  for (int t = 0; t < 200; ++t) {
    const auto [f, g] = testing::sample_equal_norm_pair(y, 0.5, rng);
    const DayWitnessTrace tr = day_witness_trace(y, f, g, 0.5, pipe.delta_fibers, pipe.delta_e);
    CHECK(tr.margin_eq1 >= -1e-9);
    CHECK(tr.margin_eq2 >= -1e-9);
    CHECK(tr.margin_eq3 >= -1e-9);
    CHECK(tr.margin_r_on_a >= -1e-9);
    CHECK(tr.margin_part1 >= -1e-9);
  }
}

TEST_CASE("trace preconditions") {
  const DirectIntegralSpace y = fixture("day_p15_a");
  const DayPipelineResult pipe = day_bound_pipeline(y, 0.5, 5000, 9);
  Rng rng(73);
  auto [f, g] = testing::sample_equal_norm_pair(y, 0.5, rng);

  DIVector big = f;
  for (auto& b : big.blocks) b = scale(b, 2.0);
  CHECK_THROWS_AS(day_witness_trace(y, big, g, 0.5, pipe.delta_fibers, pipe.delta_e),
                  std::invalid_argument);

  DIVector unequal = g;
  unequal.blocks[0] = scale(unequal.blocks[0], 0.5);
  CHECK_THROWS_AS(day_witness_trace(y, f, unequal, 0.5, pipe.delta_fibers, pipe.delta_e),
                  std::invalid_argument);

  CHECK_THROWS_AS(day_witness_trace(y, f, f, 0.5, pipe.delta_fibers, pipe.delta_e),
                  std::invalid_argument);
}

TEST_CASE("vacuous reports are skipped by verification") {
  const DirectIntegralSpace y = fixture("day_p2_a");
  DayBoundReport rep;
  rep.eps = 0.5;
  rep.vacuous = true;
  const PropertyVerdict v = verify_day_bound(y, rep, 1000, 1);
  CHECK(v.status == VerdictStatus::skipped);
}
