#include "svrt/harness/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "svrt/error.hpp"
#include "svrt/nn/checkpoint.hpp"

namespace svrt::harness {

namespace {

void say(const ExperimentConfig& config, const std::string& message) {
  if (config.log) config.log(message);
}

}  // namespace

ResultRow run_single(problems::ProblemId problem, const problems::VariantKind& variant, const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  dataset::DatasetConfig data = config.data;
  data.problem = problem;
  data.variant = variant;
  data.validate();
  const std::string tag = "p" + std::to_string(problem.value()) + "/" + variant.name() + " @" +
                          std::to_string(data.image_size) + "px n=" + std::to_string(data.n_train);
  if (dataset::dataset_matches(data)) {
    say(config, tag + ": reusing dataset");
  } else {
    say(config, tag + ": generating dataset");
    dataset::generate_dataset(data);
  }
  const auto dir = dataset::dataset_dir(data);
  const auto train = dataset::load_dataset(dir, dataset::Split::train);
  const auto test = dataset::load_dataset(dir, dataset::Split::test);

  say(config, tag + ": training " + std::to_string(config.training.iterations) + " iterations");
  const int every = std::max(1, config.training.iterations / 10);
  auto trained = nn::train(config.training, train, [&](const nn::LogEntry& e) {
    if (e.iteration % every == 0) {
      char buf[96];
      std::snprintf(buf, sizeof buf, ": iteration %d loss %.4f", e.iteration, e.loss);
      say(config, tag + buf);
    }
  });
  nn::ThreadScope threads(config.training.threads);
  ResultRow row;
  row.problem = problem.value();
  row.variant = variant.name();
  row.image_size = data.image_size;
  row.n_train = data.n_train;
  row.accuracy = nn::evaluate(trained.network, test, config.training.backend);
  row.category = problems::to_string(problems::problem_spec(problem).category);
  row.seed = config.training.seed;
  if (config.checkpoint_dir) {
    std::filesystem::create_directories(*config.checkpoint_dir);
    nn::save_checkpoint(trained.network, *config.checkpoint_dir / ("p" + std::to_string(row.problem) + "_" + row.variant + "_" +
                                                                   std::to_string(row.image_size) + "_" +
                                                                   std::to_string(row.n_train) + ".ckpt"));
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, ": test accuracy %.4f", row.accuracy);
  say(config, tag + buf);
  return row;
}

BenchmarkResult run_benchmark(const std::vector<problems::ProblemId>& problems, const ExperimentConfig& config) {
  BenchmarkResult result;
  for (const auto& p : problems) {
    try {
      result.rows.push_back(run_single(p, problems::VariantKind::original(), config));
    } catch (const Error& e) {
      result.failures.push_back({p.value(), "original", e.kind(), e.what()});
      say(config, "p" + std::to_string(p.value()) + ": failed: " + e.what());
    } catch (const std::exception& e) {
      result.failures.push_back({p.value(), "original", "internal", e.what()});
      say(config, "p" + std::to_string(p.value()) + ": failed: " + e.what());
    }
  }
  return result;
}

AuditReport audit_leakage(problems::ProblemId problem, const ExperimentConfig& config, const AuditOptions& options) {
  AuditReport report;
  report.problem = problem.value();
  const auto add = [&](const problems::VariantKind& variant, bool injected) {
    const auto row = run_single(problem, variant, config);
    report.entries.push_back({row.variant, row.accuracy, row.accuracy > kLeakThreshold, injected, row.wall_seconds});
    if (!injected && row.accuracy > kLeakThreshold) report.generator_leak = true;
  };
  if (options.control) {
    if (problems::has_control_variant(problem))
      add(problems::VariantKind::identical_control(), false);
    else
      say(config, "p" + std::to_string(problem.value()) + ": no identical-shape control, skipped");
  }
  for (const auto& v : options.injected) {
    if (v.kind != problems::VariantKind::Kind::leak) throw InvalidArgument("injected variants must be leaks, got " + v.name());
    add(v, true);
  }
  if (options.null_dataset) add(problems::VariantKind::null_labels(), false);
  return report;
}

std::vector<ResultRow> resolution_ablation(problems::ProblemId problem, const std::vector<int>& sizes,
                                           const ExperimentConfig& config) {
  if (sizes.empty()) throw InvalidArgument("no image sizes given");
  for (int s : sizes)
    if (s != 64 && s != 128) throw InvalidArgument("ablation sizes must be 64 or 128, got " + std::to_string(s));
  std::vector<ResultRow> rows;
  for (int s : sizes) {
    ExperimentConfig c = config;
    c.data.image_size = s;
    rows.push_back(run_single(problem, problems::VariantKind::original(), c));
  }
  return rows;
}

SweepResult sample_efficiency(problems::ProblemId problem, const std::vector<int>& grid, const ExperimentConfig& config,
                              double threshold) {
  if (grid.empty()) throw InvalidArgument("empty sweep grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw InvalidArgument("sweep sizes must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1]) throw InvalidArgument("sweep grid must be strictly ascending");
  }
  SweepResult result;
  result.threshold = threshold;
  for (int n : grid) {
    ExperimentConfig c = config;
    c.data.n_train = n;
    result.curve.push_back(run_single(problem, problems::VariantKind::original(), c));
    if (!result.smallest_n && result.curve.back().accuracy >= threshold) result.smallest_n = n;
  }
  return result;
}

std::string render_audit(const AuditReport& report) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "leak audit, problem %d\n", report.problem);
  out << buf;
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof buf, "  %-28s accuracy %.4f  %-5s%s\n", e.variant.c_str(), e.accuracy,
                  e.leak ? "LEAK" : "clean", e.injected ? "  (injected)" : "");
    out << buf;
  }
  out << (report.generator_leak ? "generator: LEAK\n" : "generator: clean\n");
  return out.str();
}

}  // namespace svrt::harness
