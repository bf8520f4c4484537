#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svrt/dataset.hpp"
#include "svrt/harness/report.hpp"
#include "svrt/nn/training.hpp"
#include "svrt/problems.hpp"

namespace svrt::harness {

/// Progress messages from long runs (one line each, no trailing newline).
using LogFn = std::function<void(const std::string&)>;

/// Dataset settings (problem and variant are overridden per run) plus training settings.
struct ExperimentConfig {
  dataset::DatasetConfig data;
  nn::TrainingConfig training;
  LogFn log;
  /// When set, every trained network is saved as <dir>/p<ID>_<variant>_<size>_<n>.ckpt.
  std::optional<std::filesystem::path> checkpoint_dir;
};

/// Generates the dataset unless an identical one is already on disk, trains, evaluates on the test
/// split. Exceptions propagate.
ResultRow run_single(problems::ProblemId problem, const problems::VariantKind& variant, const ExperimentConfig& config);

struct RunFailure {
  int problem = 0;
  std::string variant;
  std::string kind;
  std::string message;
};

struct BenchmarkResult {
  std::vector<ResultRow> rows;
  std::vector<RunFailure> failures;
};

/// One original-variant run per problem. A failing problem is recorded and the run continues.
BenchmarkResult run_benchmark(const std::vector<problems::ProblemId>& problems, const ExperimentConfig& config);

/// Accuracy above this on a control or null dataset means the generator leaks.
inline constexpr double kLeakThreshold = 0.6;

struct AuditEntry {
  std::string variant;
  double accuracy = 0.0;
  bool leak = false;     // accuracy > kLeakThreshold
  bool injected = false; // a deliberately leaked variant; LEAK is the expected outcome
  double wall_seconds = 0.0;
};

struct AuditReport {
  int problem = 0;
  std::vector<AuditEntry> entries;
  /// True when a non-injected entry (control or null) is flagged.
  bool generator_leak = false;
};

struct AuditOptions {
  bool control = true;  // only for problems that have an identical-shape control
  bool null_dataset = true;
  std::vector<problems::VariantKind> injected = {problems::VariantKind::leak_of(problems::LeakKind::size_bias),
                                                 problems::VariantKind::leak_of(problems::LeakKind::position_bias)};
};

AuditReport audit_leakage(problems::ProblemId problem, const ExperimentConfig& config, const AuditOptions& options = {});

/// Same training budget at each image size (each in {64, 128}); one row per size.
std::vector<ResultRow> resolution_ablation(problems::ProblemId problem, const std::vector<int>& sizes,
                                           const ExperimentConfig& config);

struct SweepResult {
  std::vector<ResultRow> curve;       // one row per grid point, ascending n
  std::optional<int> smallest_n;      // first n reaching the threshold
  double threshold = 0.99;
};

/// One fresh dataset and model per per-class training size in `grid` (strictly ascending).
SweepResult sample_efficiency(problems::ProblemId problem, const std::vector<int>& grid, const ExperimentConfig& config,
                              double threshold = 0.99);

std::string render_audit(const AuditReport& report);

}  // namespace svrt::harness
