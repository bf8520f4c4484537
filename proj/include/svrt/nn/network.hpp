#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "svrt/nn/kernels.hpp"
#include "svrt/nn/tensor.hpp"

namespace svrt::nn {

enum class LayerKind : std::uint8_t { conv = 1, maxpool = 2, fully_connected = 3, relu = 4, softmax_cross_entropy = 5 };

std::string to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  int units = 0;   // conv output channels or fully-connected units
  int kernel = 0;  // conv kernel or pooling window
  int stride = 1;

  static LayerSpec conv(int out_channels, int kernel, int stride = 1) {
    return {LayerKind::conv, out_channels, kernel, stride};
  }
  static LayerSpec maxpool(int window, int stride) { return {LayerKind::maxpool, 0, window, stride}; }
  static LayerSpec fully_connected(int units) { return {LayerKind::fully_connected, units, 0, 1}; }
  static LayerSpec relu() { return {LayerKind::relu, 0, 0, 1}; }
  static LayerSpec softmax_cross_entropy() { return {LayerKind::softmax_cross_entropy, 0, 0, 1}; }

  bool has_parameters() const { return kind == LayerKind::conv || kind == LayerKind::fully_connected; }
  bool operator==(const LayerSpec&) const = default;
};

/// Per-example activation shape (channels, height, width). Flat vectors use (n, 1, 1).
struct ActivationShape {
  int channels = 1;
  int height = 1;
  int width = 1;
  std::size_t size() const { return std::size_t(channels) * height * width; }
  bool operator==(const ActivationShape&) const = default;
};

/// Layer stack with its parameters. Input is one channel of input_h x input_w, output is 2 logits
/// followed by the softmax cross-entropy loss.
template <typename T>
class Network {
 public:
  Network(std::string architecture, int input_h, int input_w, std::vector<LayerSpec> layers);

  const std::string& architecture() const { return architecture_; }
  int input_h() const { return input_h_; }
  int input_w() const { return input_w_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  /// shapes()[i] is the input of layer i; shapes().back() is the logit shape.
  const std::vector<ActivationShape>& shapes() const { return shapes_; }

  /// Parameter tensors in layer order: weight then bias for each conv / fully-connected layer.
  const std::vector<Tensor<T>>& parameters() const { return params_; }
  /// Mutable access invalidates outstanding forward caches.
  std::vector<Tensor<T>>& mutable_parameters() {
    ++version_;
    return params_;
  }
  /// Index of the weight tensor of layer i in parameters(), or -1.
  int parameter_index(std::size_t layer) const { return param_index_.at(layer); }
  std::size_t parameter_count() const;
  std::uint64_t version() const { return version_; }

  /// Glorot-uniform weights, zero biases.
  void initialize(std::uint64_t seed);

  template <typename U>
  Network<U> cast() const;

 private:
  std::string architecture_;
  int input_h_;
  int input_w_;
  std::vector<LayerSpec> layers_;
  std::vector<ActivationShape> shapes_;
  std::vector<int> param_index_;
  std::vector<Tensor<T>> params_;
  std::uint64_t version_ = 0;
};

/// Names accepted by make_network: "lenet64" (the benchmark network), "small" (a reduced
/// conv/pool/fc stack for fast tests) and "linear" (one fully-connected layer).
std::vector<std::string> architecture_names();
std::vector<LayerSpec> architecture_layers(const std::string& name);

template <typename T>
Network<T> make_network(const std::string& architecture, int input_size, std::uint64_t seed);

template <typename T>
struct ForwardCache {
  std::vector<Tensor<T>> activations;  // input of each layer, then the logits
  std::vector<std::vector<std::int32_t>> argmax;
  std::uint64_t version = 0;
  const void* owner = nullptr;
  int batch = 0;

  const Tensor<T>& logits() const { return activations.back(); }
};

/// Runs the stack up to the logits. batch has shape (N, 1, H, W).
template <typename T>
ForwardCache<T> forward(const Network<T>& net, const Tensor<T>& batch, Backend backend = Backend::parallel);

template <typename T>
struct Gradients {
  std::vector<Tensor<T>> parameters;  // shaped like Network::parameters()
  Tensor<T> logits;                   // d loss / d logits, shape (N, 2)
  double loss = 0.0;                  // mean cross-entropy over the batch
};

/// Gradients of the mean cross-entropy. Throws InvalidArgument for a cache from another network
/// state (stale cache) or mismatched labels.
template <typename T>
Gradients<T> backward(const Network<T>& net, const ForwardCache<T>& cache, std::span<const int> labels,
                      Backend backend = Backend::parallel);

/// Row-wise softmax of (N, 2) logits.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

/// Mean cross-entropy of (N, 2) logits; computed in double.
template <typename T>
double cross_entropy(const Tensor<T>& logits, std::span<const int> labels);

}  // namespace svrt::nn
