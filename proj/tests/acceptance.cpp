// Acceptance gate: one line per criterion, nonzero exit iff any fails.
// Tolerances are pinned in this file next to the checks that use them.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "digeo/config.hpp"
#include "digeo/convexity.hpp"
#include "digeo/day_bound.hpp"
#include "digeo/io.hpp"
#include "digeo/modulus.hpp"
#include "digeo/rng.hpp"
#include "helpers.hpp"

using namespace digeo;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("criterion %d: %s - %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 1. Euclidean d=2 estimates match an independent dense pair-grid oracle
// within 2e-3; runtime < 10 s per separation at budget 1e5.
void criterion_1() {
  const NormSpec e2 = NormSpec::make_euclidean(2);
  bool ok = true;
  std::ostringstream note;
  for (double eps : {0.5, 1.0, 1.5, 2.0}) {
    const double oracle = testing::euclid_pair_grid_oracle(eps, 2000);
    const auto t0 = std::chrono::steady_clock::now();
    const ModulusPoint p = global_modulus_estimate(SpaceRef(e2), eps, 100000, 2024);
    const double dt = seconds_since(t0);
    const double err = std::fabs(p.upper - oracle);
    if (err > 2e-3 || dt >= 10.0) ok = false;
    note << "eps " << eps << " err " << err << " (" << dt << " s); ";
  }
  report(1, ok, "euclidean modulus vs pair-grid oracle: " + note.str());
}

// 2. Flat faces: l^inf and l^1 (d=2) upper estimates <= 1e-9 on the grid.
void criterion_2() {
  std::vector<double> grid;
  for (double e = 0.1; e < 2.0; e += 0.2) grid.push_back(e);
  bool ok = true;
  double worst = 0.0;
  for (NormSpec s : {NormSpec::make_inf(2), NormSpec::make_weighted_p(1.0, 2)}) {
    const ModulusCurve c = modulus_curve(SpaceRef(s), grid, 20000, 2024);
    for (double u : c.upper) {
      worst = std::max(worst, u);
      if (u > 1e-9) ok = false;
    }
  }
  report(2, ok, "flat-face upper estimates, worst " + std::to_string(worst));
}

const std::vector<std::string> kDayConfigs{"day_p15_a", "day_p15_b", "day_p2_a",
                                           "day_p2_b",  "day_p3_a",  "day_p3_b"};

// 3. Composed bound is positive and verified on all six configurations at
// eps in {0.25, 0.5, 1.0}, total runtime < 5 min at budget 1e5.
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream note;
  for (const auto& name : kDayConfigs) {
    const DirectIntegralSpace y = fixture(name);
    for (double eps : {0.25, 0.5, 1.0}) {
      const std::uint64_t s = splitmix64(std::hash<std::string>{}(name));
      const DayPipelineResult pipe = day_bound_pipeline(y, eps, 100000, derive_seed(s, 1));
      const PropertyVerdict v = verify_day_bound(y, pipe.report, 100000, derive_seed(s, 2));
      const double check_sep = std::min(2.0, 2.0 * eps * 1.01);
      const ModulusPoint measured =
          global_modulus_estimate(SpaceRef(y), check_sep, 100000, derive_seed(s, 3));
      const bool row_ok =
          pipe.report.tau > 0.0 && v.passed() && measured.upper >= pipe.report.tau - 1e-6;
      if (!row_ok) {
        ok = false;
        note << name << " eps " << eps << " tau " << pipe.report.tau << " verdict "
             << to_string(v.status) << "; ";
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 300.0) ok = false;
  report(3, ok, "quantitative bound on 6 configurations (" + std::to_string(dt) + " s)" +
                    (note.str().empty() ? "" : ": " + note.str()));
}

// 4. Proof-trace margins >= -1e-9 on 1e4 sampled equal-pointwise-norm unit
// pairs per configuration.
void criterion_4() {
  bool ok = true;
  double worst = 1e300;
  std::string worst_at;
  for (const auto& name : kDayConfigs) {
    const DirectIntegralSpace y = fixture(name);
    const double eps = 0.25;
    const DayPipelineResult pipe = day_bound_pipeline(y, eps, 10000, 11);
    Rng rng(splitmix64(std::hash<std::string>{}(name)));
    for (int t = 0; t < 10000; ++t) {
      const auto [f, g] = testing::sample_equal_norm_pair(y, eps, rng);
      const DayWitnessTrace tr = day_witness_trace(y, f, g, eps, pipe.delta_fibers, pipe.delta_e);
      const double m = std::min({tr.margin_eq1, tr.margin_eq2, tr.margin_eq3, tr.margin_r_on_a,
                                 tr.margin_part1});
      if (m < worst) {
        worst = m;
        worst_at = name;
      }
      if (m < -1e-9) ok = false;
    }
  }
  report(4, ok, "trace margins on 6x10^4 pairs, worst " + std::to_string(worst) + " (" + worst_at + ")");
}

// 5. Property suites pass on rotund fixtures and fail with re-validating
// witnesses wherever an l^1 or l^inf component enters.
void criterion_5() {
  bool ok = true;
  std::ostringstream note;
  for (const char* name : {"euclidean2", "ellipse", "prop21_a", "prop21_b"}) {
    const DirectIntegralSpace y = fixture(name);
    if (!sc_search(SpaceRef(y), 100000, 31).passed()) {
      ok = false;
      note << name << " sc; ";
    }
    Rng rng(splitmix64(std::hash<std::string>{}(name)));
    const DIVector f = random_unit_vector(y, rng);
    for (PropertyTag tag : {PropertyTag::HUDZIK_EXTREME, PropertyTag::HUDZIK_STRONG_EXTREME,
                            PropertyTag::HUDZIK_LUR})
      if (!hudzik_point_check(y, f, tag, 100000, 33).passed()) {
        ok = false;
        note << name << " hudzik; ";
      }
  }
  for (const char* name : {"l1_2", "linf_2", "bad_fiber_linf", "bad_e_l1"}) {
    const DirectIntegralSpace y = fixture(name);
    SpaceRef ref(y);
    const PropertyVerdict v = sc_search(ref, 100000, 35);
    bool revalidates = v.status == VerdictStatus::fail && v.witness.size() == 2;
    if (revalidates) {
      const double replay = ref.norm(add(v.witness[0], v.witness[1]));
      revalidates = replay >= 2.0 - 1e-9 && std::fabs((2.0 - replay) - v.margin) <= 1e-12;
    }
    if (!revalidates) {
      ok = false;
      note << name << " sc-witness; ";
    }
  }
  {
    // the sup-norm fiber must also break the pointwise condition
    const DirectIntegralSpace y = fixture("bad_fiber_linf");
    DIVector f;
    f.blocks = {{0.0, 0.0}, {1.0, 0.0}};
    const PropertyVerdict v = hudzik_point_check(y, f, PropertyTag::HUDZIK_EXTREME, 100000, 37);
    bool revalidates = v.status == VerdictStatus::fail && v.witness.size() == 2;
    if (revalidates) {
      const NormSpec& fiber = y.fibers[1];
      revalidates = std::fabs(norm_eval(fiber, add(v.witness[0], v.witness[1])) - 1.0) <= 1e-9 &&
                    std::fabs(norm_eval(fiber, sub(v.witness[0], v.witness[1])) - 1.0) <= 1e-9;
    }
    if (!revalidates) {
      ok = false;
      note << "bad_fiber_linf hudzik-witness; ";
    }
  }
  report(5, ok, note.str().empty() ? "property suites on the fixture set" : note.str());
}

// 6. Dual realization: sampled sup reaches the computed dual norm within
// 5e-3 for 20 functionals per configuration (total dim <= 8), and the
// norming-functional construction has residuals <= 1e-8 blockwise.
void criterion_6() {
  bool ok = true;
  std::ostringstream note;
  for (const char* name :
       {"euclidean2", "ellipse", "l1_2", "linf_2", "prop21_a", "prop21_b", "day_p15_a", "day_p3_b"}) {
    const DirectIntegralSpace y = fixture(name);
    const std::uint64_t s = splitmix64(std::hash<std::string>{}(name));
    for (std::uint64_t t = 0; t < 20; ++t) {
      Rng rng(derive_seed(s, t));
      DIFunctional bigF;
      for (const auto& fiber : y.fibers) bigF.blocks.push_back(rng.gaussian_vector(fiber.dim));
      if (!verify_duality_isometry(y, bigF, 30000, derive_seed(s, 100 + t), 5e-3).passed()) {
        ok = false;
        note << name << " gap(" << t << "); ";
      }
    }
    if (!y.kothe.p_inf && y.kothe.p > 1.0) {
      for (std::uint64_t t = 0; t < 20; ++t) {
        Rng rng(derive_seed(s, 200 + t));
        const DIVector f = random_unit_vector(y, rng);
        const DIFunctional bigF = construct_norming_functional(y, f);
        bool res = std::fabs(di_dual_norm(y, bigF) - 1.0) <= 1e-8 &&
                   std::fabs(di_duality_pairing(y, bigF, f) - 1.0) <= 1e-8;
        for (std::size_t i = 0; res && i < f.blocks.size(); ++i)
          res = std::fabs(dot(bigF.blocks[i], f.blocks[i]) -
                          dual_norm_eval(y.fibers[i], bigF.blocks[i]) *
                              norm_eval(y.fibers[i], f.blocks[i])) <= 1e-8;
        if (!res) {
          ok = false;
          note << name << " norming(" << t << "); ";
        }
      }
    }
  }
  report(6, ok, note.str().empty() ? "dual realization and norming residuals" : note.str());
}

// 7. Face check passes at 8 sampled centers per strongly convex
// configuration, and its margin agrees with an independently seeded
// estimate within 2e-3.
void criterion_7() {
  bool ok = true;
  std::ostringstream note;
  for (const char* name : {"prop21_a", "prop21_b", "day_p3_a"}) {
    const DirectIntegralSpace y = fixture(name);
    const std::uint64_t s = splitmix64(std::hash<std::string>{}(name));
    for (std::uint64_t c = 0; c < 8; ++c) {
      Rng rng(derive_seed(s, c));
      const DIVector f = random_unit_vector(y, rng);
      const PropertyVerdict v = strong_convexity_check(y, f, 30000, derive_seed(s, 50 + c));
      if (!v.passed()) {
        ok = false;
        note << name << " center " << c << "; ";
        continue;
      }
      if (c == 0) {
        // cross-check against the composed-space estimator, fresh seed
        const DIFunctional bigF = construct_norming_functional(y, f);
        const Vector fflat = flatten(f.blocks), Fflat = flatten(bigF.blocks);
        double independent = 1e300;
        for (double eps : {0.25, 0.5, 1.0, 1.5, 2.0})
          independent = std::min(independent,
                                 strong_modulus_estimate(SpaceRef(y), fflat, Fflat, eps, 30000,
                                                         derive_seed(s, 999)));
        if (std::fabs(independent - v.margin) > 2e-3) {
          ok = false;
          note << name << " margin drift " << std::fabs(independent - v.margin) << "; ";
        }
      }
    }
  }
  report(7, ok, note.str().empty() ? "face checks at 24 sampled centers" : note.str());
}

// 8. Reduction identities to 1e-12 on 1e4 random vectors.
void criterion_8() {
  bool ok = true;
  DirectIntegralSpace single{KotheSpace::lp(2.0, {1.0}), {NormSpec::make_weighted_p(4.0, 3)}};
  single.validate();
  DirectIntegralSpace psum{KotheSpace::lp(3.0, {1.0, 1.0}),
                           {NormSpec::make_euclidean(2), NormSpec::make_weighted_p(4.0, 3)}};
  psum.validate();
  Rng rng(2718);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    DIVector f{{rng.gaussian_vector(3)}};
    worst = std::max(worst, std::fabs(di_norm(single, f) - norm_eval(single.fibers[0], f.blocks[0])));

    DIVector g{{rng.gaussian_vector(2), rng.gaussian_vector(3)}};
    const double a = norm_eval(psum.fibers[0], g.blocks[0]);
    const double b = norm_eval(psum.fibers[1], g.blocks[1]);
    worst = std::max(worst, std::fabs(di_norm(psum, g) - std::cbrt(a * a * a + b * b * b)));
  }
  if (worst > 1e-12) ok = false;
  report(8, ok, "reduction identities, worst deviation " + std::to_string(worst));
}

// 9. Byte-identical reruns for identical configurations.
void criterion_9() {
  bool ok = true;
  std::ostringstream note;
  const std::string base = (fs::temp_directory_path() / "digeo_accept_").string();
  struct Job {
    const char* task;
    const char* space;
  };
  for (const Job& job : {Job{"modulus", "prop21_a"}, Job{"check", "euclidean2"},
                         Job{"day-bound", "day_p15_a"}}) {
    ExperimentConfig cfg;
    cfg.task = job.task;
    cfg.space = job.space;
    cfg.eps_start = 0.5;
    cfg.eps_stop = 0.5;
    cfg.eps_step = 0.5;
    cfg.budget = 5000;
    cfg.seed = 99;
    cfg.out = base + job.task + ".out";
    if (run_experiment(cfg) > exit_property_failed) ok = false;
    const std::string first = slurp(cfg.out);
    if (run_experiment(cfg) > exit_property_failed) ok = false;
    if (first.empty() || slurp(cfg.out) != first) {
      ok = false;
      note << job.task << " differs; ";
    }
    fs::remove(cfg.out);
  }
  report(9, ok, note.str().empty() ? "byte-identical reruns for modulus, check, day-bound" : note.str());
}

}  // namespace

int main() {
  std::printf("acceptance gate (%s)\n", kArtifactVersion);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
