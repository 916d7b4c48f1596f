// Timings for the data-parallel kernels against the pinned serial path.
// The two paths are bit-identical by construction; the benchmark reports
// wall time and re-checks the equality on the side.
#include <chrono>
#include <cmath>
#include <cstdio>

#include "digeo/config.hpp"
#include "digeo/day_bound.hpp"
#include "digeo/io.hpp"
#include "digeo/modulus.hpp"

using namespace digeo;

namespace {

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  const DirectIntegralSpace y = fixture("prop21_b");
  const std::uint64_t budget = 200000, seed = 42;

  {
    ModulusPoint a, b;
    const double ts = time_ms([&] {
      set_parallel(false);
      a = global_modulus_estimate(SpaceRef(y), 1.0, budget, seed);
    });
    const double tp = time_ms([&] {
      set_parallel(true);
      b = global_modulus_estimate(SpaceRef(y), 1.0, budget, seed);
    });
    report("multistart modulus", ts, tp, a.upper == b.upper && a.witness_x == b.witness_x);
  }

  {
    const NormSpec euclid = NormSpec::make_euclidean(2);
    std::optional<double> a, b;
    const double ts = time_ms([&] {
      set_parallel(false);
      a = certified_lower_bound(euclid, 1.0, 60000);
    });
    const double tp = time_ms([&] {
      set_parallel(true);
      b = certified_lower_bound(euclid, 1.0, 60000);
    });
    report("certified lower bound", ts, tp, a == b);
  }

  {
    DayPipelineResult a, b;
    const double ts = time_ms([&] {
      set_parallel(false);
      a = day_bound_pipeline(y, 0.5, 40000, seed);
    });
    const double tp = time_ms([&] {
      set_parallel(true);
      b = day_bound_pipeline(y, 0.5, 40000, seed);
    });
    report("day bound pipeline", ts, tp,
           a.report.tau == b.report.tau && a.report.alpha == b.report.alpha);
  }

  set_parallel(true);
  return 0;
}
