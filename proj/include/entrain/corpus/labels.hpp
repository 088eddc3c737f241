#pragma once

#include <string>

#include "entrain/error.hpp"
#include "entrain/types.hpp"

namespace entrain::corpus {

inline constexpr int kMinDifferences = 10;
inline constexpr int kMaxDifferences = 30;
inline constexpr int kMedianDifferences = 20;

/// Communicative-efficiency label from the number of differences found:
/// 10-19 low, 21-30 high, the median score 20 excluded.
inline SuccessLabel assign_label(int differences_found) {
  if (differences_found < kMinDifferences || differences_found > kMaxDifferences) {
    throw ValidationError("differences_found " + std::to_string(differences_found) +
                          " outside [10, 30]");
  }
  if (differences_found < kMedianDifferences) return SuccessLabel::Low;
  if (differences_found > kMedianDifferences) return SuccessLabel::High;
  return SuccessLabel::Excluded;
}

}  // namespace entrain::corpus
