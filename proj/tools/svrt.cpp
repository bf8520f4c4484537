// svrt: command line front end of the workbench.
//
// Every subcommand prints its result on stdout. On failure it prints one JSON
// line {"error": kind, "message": ...} on stderr and exits with status 1
// (2 for usage errors).

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "svrt/dataset.hpp"
#include "svrt/error.hpp"
#include "svrt/harness/experiments.hpp"
#include "svrt/harness/human.hpp"
#include "svrt/harness/report.hpp"
#include "svrt/harness/server.hpp"
#include "svrt/nn/checkpoint.hpp"
#include "svrt/nn/training.hpp"

using namespace svrt;
using nlohmann::ordered_json;

namespace {

struct DataFlags {
  int problem = 1;
  std::string variant = "original";
  int n_train = 2000;
  int n_test = 1000;
  int image_size = 64;
  std::string out = "data";

  void add(CLI::App* app, bool with_problem = true) {
    if (with_problem) app->add_option("--problem", problem, "Problem id")->capture_default_str();
    app->add_option("--n-train", n_train, "Training images per class")->capture_default_str();
    app->add_option("--n-test", n_test, "Test images per class")->capture_default_str();
    app->add_option("--image-size", image_size, "Image side in pixels (64, 128 or 224)")->capture_default_str();
    app->add_option("--out", out, "Dataset root directory")->capture_default_str();
  }

  dataset::DatasetConfig config(std::uint64_t seed) const {
    dataset::DatasetConfig c;
    c.problem = problems::ProblemId(problem);
    c.variant = problems::VariantKind::parse(variant);
    c.n_train = n_train;
    c.n_test = n_test;
    c.image_size = image_size;
    c.master_seed = seed;
    c.output_path = out;
    c.validate();
    return c;
  }
};

struct TrainFlags {
  int iterations = 5000;
  int batch = 32;
  double learning_rate = 0.001;
  double weight_decay = 5e-5;
  std::string arch = "lenet64";
  int threads = 0;
  std::string backend = "parallel";

  void add(CLI::App* app) {
    app->add_option("--iterations", iterations, "ADAM steps")->capture_default_str();
    app->add_option("--batch-size", batch, "Mini-batch size")->capture_default_str();
    app->add_option("--learning-rate", learning_rate)->capture_default_str();
    app->add_option("--weight-decay", weight_decay)->capture_default_str();
    app->add_option("--arch", arch, "Network architecture")->capture_default_str();
    app->add_option("--threads", threads, "OpenMP threads (0 = runtime default, 1 = reproducible)")
        ->capture_default_str();
    app->add_option("--backend", backend, "Kernel backend")
        ->check(CLI::IsMember({"parallel", "reference"}))
        ->capture_default_str();
  }

  nn::TrainingConfig config(std::uint64_t seed) const {
    nn::TrainingConfig c;
    c.iterations = iterations;
    c.batch_size = batch;
    c.learning_rate = learning_rate;
    c.weight_decay = weight_decay;
    c.architecture = arch;
    c.threads = threads;
    c.seed = seed;
    c.backend = backend == "reference" ? nn::Backend::reference : nn::Backend::parallel;
    c.validate();
    return c;
  }
};

void log_line(const std::string& s) { std::cerr << s << std::endl; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json row_json(const harness::ResultRow& r) {
  return {{"problem", r.problem},   {"variant", r.variant},   {"image_size", r.image_size},
          {"n_train", r.n_train},   {"accuracy", r.accuracy}, {"category", r.category},
          {"seed", r.seed},         {"wall_seconds", r.wall_seconds}};
}

harness::TrialServer* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-class abstract shape problems: generation, training, audits, trial service"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;

  // generate
  DataFlags gen_data;
  auto* gen = app.add_subcommand("generate", "Write a dataset (images, manifest.jsonl, dataset.json)");
  gen_data.add(gen);
  gen->add_option("--variant", gen_data.variant, "original, identical_control, null, leak_size_bias, ...")
      ->capture_default_str();
  gen->add_option("--seed", seed, "Master seed")->capture_default_str();

  // train
  DataFlags train_data;
  TrainFlags train_flags;
  std::string train_dir, checkpoint_path = "model.ckpt", train_log_path;
  auto* train = app.add_subcommand("train", "Train a network on a dataset and save a checkpoint");
  train_data.add(train);
  train->add_option("--variant", train_data.variant)->capture_default_str();
  train_flags.add(train);
  train->add_option("--data", train_dir, "Existing dataset directory (skips generation)");
  train->add_option("--checkpoint", checkpoint_path, "Output checkpoint")->capture_default_str();
  train->add_option("--log", train_log_path, "JSON-lines training log");
  train->add_option("--seed", seed, "Training seed")->capture_default_str();
  train->add_option("--data-seed", data_seed, "Dataset master seed (defaults to --seed)");

  // eval
  std::string eval_checkpoint, eval_dir, eval_split = "test", eval_backend = "parallel";
  auto* eval = app.add_subcommand("eval", "Accuracy of a checkpoint on a dataset split");
  eval->add_option("--checkpoint", eval_checkpoint)->required();
  eval->add_option("--data", eval_dir, "Dataset directory")->required();
  eval->add_option("--split", eval_split)->check(CLI::IsMember({"train", "test"}))->capture_default_str();
  eval->add_option("--backend", eval_backend)->check(CLI::IsMember({"parallel", "reference"}))->capture_default_str();
  eval->add_option("--seed", seed, "Unused; accepted for uniformity");

  // bench
  DataFlags bench_data;
  TrainFlags bench_flags;
  std::vector<int> bench_problems;
  std::string bench_csv, bench_ckpt_dir;
  auto* bench = app.add_subcommand("bench", "Train and evaluate one model per problem; print the table");
  bench_data.add(bench, false);
  bench_flags.add(bench);
  bench->add_option("--problems", bench_problems, "Problem ids (default: all 20)")->delimiter(',');
  bench->add_option("--csv", bench_csv, "Write rows as CSV");
  bench->add_option("--checkpoints", bench_ckpt_dir, "Save every trained network here");
  bench->add_option("--seed", seed, "Seed for data and training")->capture_default_str();
  bench->add_option("--data-seed", data_seed, "Dataset master seed (defaults to --seed)");

  // audit
  DataFlags audit_data;
  TrainFlags audit_flags;
  bool audit_no_position = false;
  auto* audit = app.add_subcommand("audit", "Leak audit: control, injected leaks, null dataset");
  audit_data.add(audit);
  audit_flags.add(audit);
  audit->add_flag("--no-position-bias", audit_no_position, "Skip the position_bias injection");
  audit->add_option("--seed", seed)->capture_default_str();
  audit->add_option("--data-seed", data_seed);

  // ablate
  DataFlags ablate_data;
  TrainFlags ablate_flags;
  std::vector<int> ablate_sizes{64, 128};
  ablate_data.problem = 16;
  auto* ablate = app.add_subcommand("ablate", "Same budget at several image sizes");
  ablate_data.add(ablate);
  ablate_flags.add(ablate);
  ablate->add_option("--sizes", ablate_sizes)->delimiter(',')->capture_default_str();
  ablate->add_option("--seed", seed)->capture_default_str();
  ablate->add_option("--data-seed", data_seed);

  // sweep
  DataFlags sweep_data;
  TrainFlags sweep_flags;
  std::vector<int> sweep_grid{100, 200, 400, 1000, 2000};
  double sweep_threshold = 0.99;
  sweep_data.problem = 2;
  auto* sweep = app.add_subcommand("sweep", "Accuracy versus training-set size");
  sweep_data.add(sweep);
  sweep_flags.add(sweep);
  sweep->add_option("--grid", sweep_grid, "Ascending per-class training sizes")->delimiter(',')->capture_default_str();
  sweep->add_option("--threshold", sweep_threshold)->capture_default_str();
  sweep->add_option("--seed", seed)->capture_default_str();
  sweep->add_option("--data-seed", data_seed);

  // human-accuracy
  harness::HumanCohortStats stats;
  auto* human = app.add_subcommand("human-accuracy", "Expected cohort accuracy (p_a + p_n/2) / n");
  human->add_option("--p-a", stats.p_a, "Participants who solved")->required();
  human->add_option("--p-n", stats.p_n, "Participants who did not")->required();
  human->add_option("--n", stats.n, "Participants (defaults to p_a + p_n)");
  human->add_option("--seed", seed, "Unused; accepted for uniformity");

  // serve
  std::string host = "127.0.0.1", session_log;
  int port = 8080;
  harness::SessionParams session_params;
  std::vector<int> serve_problems;
  auto* serve = app.add_subcommand("serve", "HTTP trial service for human participants");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--k-consecutive", session_params.k_consecutive)->capture_default_str();
  serve->add_option("--max-trials", session_params.max_trials)->capture_default_str();
  serve->add_option("--image-size", session_params.image_size)->capture_default_str();
  serve->add_option("--problems", serve_problems, "Problems offered (default: all)")->delimiter(',');
  serve->add_option("--session-log", session_log, "Append-only JSON-lines log of answers");
  serve->add_option("--seed", seed)->capture_default_str();

  // report
  std::string report_csv;
  auto* report = app.add_subcommand("report", "Render a results CSV as the grouped table");
  report->add_option("--csv", report_csv)->required();
  report->add_option("--seed", seed, "Unused; accepted for uniformity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << ordered_json{{"error", "usage"}, {"message", e.what()}}.dump() << std::endl;
    return 2;
  }

  try {
    const std::uint64_t dseed = data_seed.value_or(seed);
    const auto experiment = [&](const DataFlags& d, const TrainFlags& t) {
      harness::ExperimentConfig c;
      c.data = d.config(dseed);
      c.training = t.config(seed);
      c.log = log_line;
      return c;
    };

    if (*gen) {
      const auto config = gen_data.config(seed);
      const auto records = dataset::generate_dataset(config);
      std::cout << ordered_json{{"directory", dataset::dataset_dir(config).string()}, {"images", records.size()}}.dump()
                << std::endl;
    } else if (*train) {
      std::filesystem::path dir = train_dir;
      if (train_dir.empty()) {
        const auto config = train_data.config(dseed);
        if (!dataset::dataset_matches(config)) dataset::generate_dataset(config);
        dir = dataset::dataset_dir(config);
      }
      const auto data = dataset::load_dataset(dir, dataset::Split::train);
      std::optional<std::ofstream> log;
      if (!train_log_path.empty()) {
        log.emplace(train_log_path, std::ios::trunc);
        if (!*log) throw IoError("cannot write " + train_log_path);
      }
      const auto config = train_flags.config(seed);
      const auto result = nn::train(config, data, [&](const nn::LogEntry& e) {
        if (log) *log << nn::to_json_line(e) << '\n';
      });
      nn::save_checkpoint(result.network, checkpoint_path);
      std::cout << ordered_json{{"checkpoint", checkpoint_path},
                                {"iterations", config.iterations},
                                {"final_loss", result.log.back().loss}}
                       .dump()
                << std::endl;
    } else if (*eval) {
      const auto net = nn::load_checkpoint<float>(eval_checkpoint);
      const auto data = dataset::load_dataset(eval_dir, dataset::parse_split(eval_split));
      const double acc =
          nn::evaluate(net, data, eval_backend == "reference" ? nn::Backend::reference : nn::Backend::parallel);
      std::cout << ordered_json{{"accuracy", acc}, {"examples", data.size()}}.dump() << std::endl;
    } else if (*bench) {
      auto config = experiment(bench_data, bench_flags);
      if (!bench_ckpt_dir.empty()) config.checkpoint_dir = bench_ckpt_dir;
      std::vector<problems::ProblemId> ids;
      if (bench_problems.empty())
        for (const auto& [id, category] : problems::list_problems()) ids.push_back(id);
      else
        for (int p : bench_problems) ids.emplace_back(p);
      const auto result = harness::run_benchmark(ids, config);
      if (!bench_csv.empty()) write_text(bench_csv, harness::to_csv(result.rows));
      std::cout << harness::render_table(result.rows);
      for (const auto& f : result.failures)
        std::cout << ordered_json{{"failed_problem", f.problem}, {"error", f.kind}, {"message", f.message}}.dump()
                  << std::endl;
      if (!result.failures.empty()) return 1;
    } else if (*audit) {
      harness::AuditOptions options;
      if (audit_no_position)
        options.injected = {problems::VariantKind::leak_of(problems::LeakKind::size_bias)};
      const auto report = harness::audit_leakage(problems::ProblemId(audit_data.problem),
                                                 experiment(audit_data, audit_flags), options);
      std::cout << harness::render_audit(report);
    } else if (*ablate) {
      const auto rows =
          harness::resolution_ablation(problems::ProblemId(ablate_data.problem), ablate_sizes, experiment(ablate_data, ablate_flags));
      for (const auto& r : rows) std::cout << row_json(r).dump() << std::endl;
    } else if (*sweep) {
      const auto result = harness::sample_efficiency(problems::ProblemId(sweep_data.problem), sweep_grid,
                                                     experiment(sweep_data, sweep_flags), sweep_threshold);
      for (const auto& r : result.curve) std::cout << row_json(r).dump() << std::endl;
      ordered_json summary{{"threshold", result.threshold}, {"smallest_n", nullptr}};
      if (result.smallest_n) summary["smallest_n"] = *result.smallest_n;
      std::cout << summary.dump() << std::endl;
    } else if (*human) {
      if (human->count("--n") == 0) stats.n = stats.p_a + stats.p_n;
      std::cout << ordered_json{{"p_a", stats.p_a}, {"p_n", stats.p_n}, {"n", stats.n},
                                {"accuracy", harness::human_accuracy(stats)}}
                       .dump()
                << std::endl;
    } else if (*serve) {
      std::optional<std::filesystem::path> log_path;
      if (!session_log.empty()) log_path = session_log;
      harness::TrialSessionManager manager(session_params, seed, serve_problems, log_path);
      harness::TrialServer server(manager);
      const int bound = server.bind(host, port);
      active_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << ordered_json{{"listening", host + ":" + std::to_string(bound)}}.dump() << std::endl;
      server.serve();
      active_server = nullptr;
    } else if (*report) {
      std::cout << harness::render_table(harness::parse_csv(read_text(report_csv)));
    }
  } catch (const Error& e) {
    std::cerr << ordered_json{{"error", e.kind()}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "internal"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  }
  return 0;
}
