#include "svrt/nn/training.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>
#include <omp.h>

#include "svrt/error.hpp"
#include "svrt/nn/optimizer.hpp"
#include "svrt/rng.hpp"

namespace svrt::nn {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;     // "init"
constexpr std::uint64_t kShuffleStream = 0x73687566;  // "shuf"

int image_size_of(std::span<const dataset::Example> data) {
  if (data.empty()) throw InvalidArgument("empty data set");
  const int size = data.front().image.width;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].image.width != size || data[i].image.height != size)
      throw ShapeMismatch("example " + std::to_string(i) + " is not " + std::to_string(size) + "x" +
                          std::to_string(size));
  return size;
}

}  // namespace

void TrainingConfig::validate() const {
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
  if (!(learning_rate > 0)) throw InvalidArgument("learning rate must be positive");
  if (weight_decay < 0) throw InvalidArgument("weight decay must be >= 0");
  architecture_layers(architecture);
}

std::string to_json_line(const LogEntry& entry) {
  nlohmann::ordered_json j;
  j["iteration"] = entry.iteration;
  j["loss"] = entry.loss;
  return j.dump();
}

ThreadScope::ThreadScope(int threads) {
  if (threads <= 0) return;
  previous_ = omp_get_max_threads();
  active_ = true;
  omp_set_num_threads(threads);
}

ThreadScope::~ThreadScope() {
  if (active_) omp_set_num_threads(previous_);
}

template <typename T>
Tensor<T> make_batch(std::span<const dataset::Example> data, std::span<const std::size_t> indices) {
  if (indices.empty()) throw InvalidArgument("empty batch");
  const int w = data[indices[0]].image.width, h = data[indices[0]].image.height;
  Tensor<T> out({indices.size(), 1, std::size_t(h), std::size_t(w)});
  const std::size_t plane = std::size_t(w) * h;
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& img = data[indices[b]].image;
    if (img.width != w || img.height != h) throw ShapeMismatch("mixed image sizes in one batch");
    for (std::size_t p = 0; p < plane; ++p) out[b * plane + p] = static_cast<T>(img.pixels[p]) / T{255};
  }
  return out;
}

template Tensor<float> make_batch<float>(std::span<const dataset::Example>, std::span<const std::size_t>);
template Tensor<double> make_batch<double>(std::span<const dataset::Example>, std::span<const std::size_t>);

TrainingResult train(const TrainingConfig& config, std::span<const dataset::Example> data,
                     const ProgressFn& progress) {
  config.validate();
  const int size = image_size_of(data);
  bool seen[2] = {false, false};
  for (const auto& e : data) seen[e.label.value()] = true;
  if (!seen[0] || !seen[1]) throw InvalidArgument("training data must contain both classes");

  ThreadScope threads(config.threads);
  TrainingResult result{make_network<float>(config.architecture, size, hash_combine(config.seed, kInitStream)), {}};
  Network<float>& net = result.network;
  AdamState<float> adam(net.parameters(), {config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay});

  Rng rng(hash_combine(config.seed, kShuffleStream));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  std::size_t cursor = 0;

  std::vector<std::size_t> picked(config.batch_size);
  std::vector<int> labels(config.batch_size);
  result.log.reserve(config.iterations);
  for (int it = 1; it <= config.iterations; ++it) {
    for (int b = 0; b < config.batch_size; ++b) {
      if (cursor == order.size()) {
        shuffle(order, rng);
        cursor = 0;
      }
      picked[b] = order[cursor++];
      labels[b] = data[picked[b]].label.value();
    }
    const auto batch = make_batch<float>(data, picked);
    const auto cache = forward(net, batch, config.backend);
    auto grads = backward(net, cache, labels, config.backend);
    if (!std::isfinite(grads.loss)) throw TrainingDiverged(it - 1, "non-finite loss at iteration " + std::to_string(it));
    try {
      adam.step(net.mutable_parameters(), grads.parameters);
    } catch (const NumericalError& e) {
      throw TrainingDiverged(it - 1, std::string(e.what()) + " at iteration " + std::to_string(it));
    }
    result.log.push_back({it, grads.loss});
    if (progress) progress(result.log.back());
  }
  return result;
}

std::vector<int> predict(const Network<float>& net, std::span<const dataset::Example> data, Backend backend,
                         int batch_size) {
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
  std::vector<int> out;
  out.reserve(data.size());
  std::vector<std::size_t> picked;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    picked.clear();
    for (std::size_t i = start; i < std::min(data.size(), start + batch_size); ++i) picked.push_back(i);
    const auto cache = forward(net, make_batch<float>(data, picked), backend);
    const auto& logits = cache.logits();
    for (std::size_t r = 0; r < picked.size(); ++r) out.push_back(logits[2 * r + 1] > logits[2 * r] ? 1 : 0);
  }
  return out;
}

double evaluate(const Network<float>& net, std::span<const dataset::Example> data, Backend backend, int batch_size) {
  if (data.empty()) throw InvalidArgument("empty evaluation set");
  const auto predicted = predict(net, data, backend, batch_size);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) correct += predicted[i] == data[i].label.value();
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace svrt::nn
