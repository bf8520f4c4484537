#pragma once

#include <cstdint>

namespace svrt::harness {

/// Outcome counts of one problem's human cohort.
struct HumanCohortStats {
  std::int64_t p_a = 0;  // participants who solved the problem
  std::int64_t p_n = 0;  // participants who did not
  std::int64_t n = 0;    // all participants

  /// Throws InvalidArgument unless all counts are >= 0, n >= 1 and p_a + p_n == n.
  void validate() const;
  bool operator==(const HumanCohortStats&) const = default;
};

/// Expected cohort accuracy (p_a + p_n / 2) / n: solvers count as 1.0, the
/// rest as chance. Correctly rounded; always in [0.5, 1].
double human_accuracy(const HumanCohortStats& stats);

}  // namespace svrt::harness
