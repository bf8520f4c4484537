#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "svrt/dataset.hpp"
#include "svrt/nn/network.hpp"

namespace svrt::nn {

struct TrainingConfig {
  int iterations = 5000;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double learning_rate = 0.001;
  double weight_decay = 5e-5;
  std::string architecture = "lenet64";
  Backend backend = Backend::parallel;
  int threads = 0;  // OpenMP threads; 0 keeps the runtime default

  void validate() const;
};

struct LogEntry {
  int iteration = 0;  // 1-based
  double loss = 0.0;  // mean loss of the mini-batch before the update
  bool operator==(const LogEntry&) const = default;
};

std::string to_json_line(const LogEntry& entry);

struct TrainingResult {
  Network<float> network;
  std::vector<LogEntry> log;
};

using ProgressFn = std::function<void(const LogEntry&)>;

/// ADAM over mini-batches drawn from seeded per-epoch permutations (a batch may straddle an epoch
/// boundary). Bit-reproducible for a fixed config when threads == 1.
/// Throws TrainingDiverged on a non-finite loss or gradient.
TrainingResult train(const TrainingConfig& config, std::span<const dataset::Example> data,
                     const ProgressFn& progress = {});

/// Fraction of examples whose argmax logit equals the label.
double evaluate(const Network<float>& net, std::span<const dataset::Example> data,
                Backend backend = Backend::parallel, int batch_size = 64);

/// Argmax class per example.
std::vector<int> predict(const Network<float>& net, std::span<const dataset::Example> data,
                         Backend backend = Backend::parallel, int batch_size = 64);

/// (N, 1, H, W) tensor with pixels mapped to [0, 1] (background 1.0).
template <typename T>
Tensor<T> make_batch(std::span<const dataset::Example> data, std::span<const std::size_t> indices);

/// Sets the OpenMP thread count for the lifetime of the object (no-op for 0).
class ThreadScope {
 public:
  explicit ThreadScope(int threads);
  ~ThreadScope();
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int previous_ = 0;
  bool active_ = false;
};

}  // namespace svrt::nn
