#include "svrt/harness/human.hpp"

#include <string>

#include "svrt/error.hpp"

namespace svrt::harness {

void HumanCohortStats::validate() const {
  if (n < 1) throw InvalidArgument("cohort must have at least one participant (n = " + std::to_string(n) + ")");
  if (p_a < 0 || p_n < 0) throw InvalidArgument("participant counts must be non-negative");
  if (p_a + p_n != n)
    throw InvalidArgument("p_a + p_n must equal n (" + std::to_string(p_a) + " + " + std::to_string(p_n) +
                          " != " + std::to_string(n) + ")");
}

double human_accuracy(const HumanCohortStats& stats) {
  stats.validate();
  // Both operands are exact integers in double, so the single division is correctly rounded.
  return static_cast<double>(2 * stats.p_a + stats.p_n) / static_cast<double>(2 * stats.n);
}

}  // namespace svrt::harness
