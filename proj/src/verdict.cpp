#include "digeo/verdict.hpp"

namespace digeo {

const char* to_string(PropertyTag tag) {
  switch (tag) {
    case PropertyTag::SC: return "SC";
    case PropertyTag::LUC: return "LUC";
    case PropertyTag::MLUC: return "MLUC";
    case PropertyTag::UC: return "UC";
    case PropertyTag::STRONG: return "STRONG";
    case PropertyTag::HUDZIK_EXTREME: return "HUDZIK_EXTREME";
    case PropertyTag::HUDZIK_STRONG_EXTREME: return "HUDZIK_STRONG_EXTREME";
    case PropertyTag::HUDZIK_LUR: return "HUDZIK_LUR";
    case PropertyTag::DUALITY_ISOMETRY: return "DUALITY_ISOMETRY";
    case PropertyTag::LATTICE_MONOTONE: return "LATTICE_MONOTONE";
    case PropertyTag::DAY_BOUND: return "DAY_BOUND";
  }
  return "?";
}

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::pass: return "pass";
    case VerdictStatus::fail: return "fail";
    case VerdictStatus::skipped: return "skipped";
  }
  return "?";
}

}  // namespace digeo
