#pragma once

namespace digeo {

// All numeric tolerances used by the library, centralized so that every
// verdict is reproducible from one record. Defaults follow the per-operation
// contracts; callers may pass a modified copy where an operation takes one.
struct Tolerances {
  double norm_exact = 1e-12;       // homogeneity, radial projection, reduction identities
  double pairing_slack = 1e-9;     // Hoelder-type inequalities
  double dual_cross = 1e-8;        // closed-form dual vs direct maximization
  double witness_feasibility = 1e-9;
  double witness_replay = 1e-12;   // re-evaluating a stored witness
  double flat_face = 1e-9;         // threshold for "modulus is zero here"
  double duality_gap = 5e-3;       // sampled sup vs dual norm, total dim <= 8
  double day_margin = 1e-9;        // proof-trace inequality slack
  double day_sep_slack = 1e-6;     // separation slack in the composed-bound conclusion
  double norming_residual = 1e-8;  // norming-functional construction residuals
};

const Tolerances& tols();

// Process-wide execution policy for the data-parallel kernels. The parallel
// and serial paths are bit-identical by construction; tests pin the serial
// path and compare.
bool parallel_enabled();
void set_parallel(bool on);

}  // namespace digeo
