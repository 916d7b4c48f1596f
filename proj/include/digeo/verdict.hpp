#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "digeo/vec.hpp"

namespace digeo {

enum class PropertyTag {
  SC,
  LUC,
  MLUC,
  UC,
  STRONG,
  HUDZIK_EXTREME,
  HUDZIK_STRONG_EXTREME,
  HUDZIK_LUR,
  DUALITY_ISOMETRY,
  LATTICE_MONOTONE,
  DAY_BOUND,
};

enum class VerdictStatus { pass, fail, skipped };

const char* to_string(PropertyTag tag);
const char* to_string(VerdictStatus status);

// Outcome of one property suite run. A fail always carries a witness that
// re-validates: plugging the witness back into the violated inequality
// reproduces the violation.
struct PropertyVerdict {
  PropertyTag tag = PropertyTag::SC;
  VerdictStatus status = VerdictStatus::pass;
  double margin = 0.0;
  std::string note;
  std::vector<Vector> witness;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;

  bool passed() const { return status == VerdictStatus::pass; }
};

}  // namespace digeo
