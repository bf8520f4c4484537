#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svrt::harness {

/// One trained-and-evaluated configuration.
struct ResultRow {
  int problem = 0;
  std::string variant = "original";
  int image_size = 64;
  int n_train = 0;  // per class
  double accuracy = 0.0;
  std::string category;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool operator==(const ResultRow&) const = default;
};

/// Reference accuracies for one problem (LeNet, GoogLeNet, the original SVRT boosting baseline,
/// human cohort), shipped as static data for side-by-side reports.
struct ReferenceAccuracy {
  int problem = 0;
  double lenet = 0.0;
  double googlenet = 0.0;
  double svrt_baseline = 0.0;
  double human = 0.0;
};

const std::vector<ReferenceAccuracy>& reference_accuracies();
std::optional<ReferenceAccuracy> reference_accuracy(int problem);

/// Reference LeNet accuracies on the identical-shape control variants (problems 6, 8, 17).
std::optional<double> reference_control_accuracy(int problem);

inline constexpr std::string_view kCsvHeader = "problem,variant,image_size,n_train,accuracy,category,seed,wall_seconds";

std::string to_csv(const std::vector<ResultRow>& rows);
/// Inverse of to_csv. Throws InvalidArgument on a wrong header or malformed line.
std::vector<ResultRow> parse_csv(std::string_view text);

/// Aligned plain-text table: a comparison block and a non-comparison block, each followed by its
/// average row, then an overall average. Reference columns come from reference_accuracies().
std::string render_table(const std::vector<ResultRow>& rows);

}  // namespace svrt::harness
