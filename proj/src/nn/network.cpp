#include "svrt/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "svrt/error.hpp"
#include "svrt/rng.hpp"

namespace svrt::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv: return "conv";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::fully_connected: return "fully_connected";
    case LayerKind::relu: return "relu";
    case LayerKind::softmax_cross_entropy: return "softmax_cross_entropy";
  }
  return "unknown";
}

template <typename T>
Network<T>::Network(std::string architecture, int input_h, int input_w, std::vector<LayerSpec> layers)
    : architecture_(std::move(architecture)), input_h_(input_h), input_w_(input_w), layers_(std::move(layers)) {
  if (input_h < 1 || input_w < 1) throw InvalidArgument("input size must be positive");
  if (layers_.empty() || layers_.back().kind != LayerKind::softmax_cross_entropy)
    throw InvalidArgument("the last layer must be softmax_cross_entropy");
  ActivationShape s{1, input_h, input_w};
  shapes_.push_back(s);
  int last_fc_units = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    const std::string where = "layer " + std::to_string(i) + " (" + to_string(l.kind) + ")";
    param_index_.push_back(-1);
    switch (l.kind) {
      case LayerKind::conv: {
        if (l.units < 1 || l.kernel < 1 || l.stride < 1) throw InvalidArgument(where + ": bad configuration");
        if (s.height < l.kernel || s.width < l.kernel) throw InvalidArgument(where + ": kernel larger than input");
        param_index_.back() = static_cast<int>(params_.size());
        params_.emplace_back(std::vector<std::size_t>{std::size_t(l.units), std::size_t(s.channels),
                                                      std::size_t(l.kernel), std::size_t(l.kernel)});
        params_.emplace_back(std::vector<std::size_t>{std::size_t(l.units)});
        s = {l.units, (s.height - l.kernel) / l.stride + 1, (s.width - l.kernel) / l.stride + 1};
        break;
      }
      case LayerKind::maxpool: {
        if (l.kernel < 1 || l.stride < 1) throw InvalidArgument(where + ": bad configuration");
        if (s.height < l.kernel || s.width < l.kernel) throw InvalidArgument(where + ": window larger than input");
        s = {s.channels, (s.height - l.kernel) / l.stride + 1, (s.width - l.kernel) / l.stride + 1};
        break;
      }
      case LayerKind::fully_connected: {
        if (l.units < 1) throw InvalidArgument(where + ": bad configuration");
        param_index_.back() = static_cast<int>(params_.size());
        params_.emplace_back(std::vector<std::size_t>{std::size_t(l.units), s.size()});
        params_.emplace_back(std::vector<std::size_t>{std::size_t(l.units)});
        s = {l.units, 1, 1};
        last_fc_units = l.units;
        break;
      }
      case LayerKind::relu:
        break;
      case LayerKind::softmax_cross_entropy:
        if (i + 1 != layers_.size()) throw InvalidArgument(where + ": must be the last layer");
        break;
    }
    shapes_.push_back(s);
  }
  if (last_fc_units != 2 || s.size() != 2)
    throw InvalidArgument("the final fully-connected layer must have exactly 2 units");
  // The softmax layer does not change the shape; drop its duplicate output entry.
  shapes_.pop_back();
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

template <typename T>
void Network<T>::initialize(std::uint64_t seed) {
  Rng rng(seed);
  ++version_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const int idx = param_index_[i];
    if (idx < 0) continue;
    Tensor<T>& w = params_[idx];
    const LayerSpec& l = layers_[i];
    double fan_in = 0, fan_out = 0;
    if (l.kind == LayerKind::conv) {
      const double area = double(l.kernel) * l.kernel;
      fan_in = double(w.dim(1)) * area;
      fan_out = double(l.units) * area;
    } else {
      fan_in = double(w.dim(1));
      fan_out = double(l.units);
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w.values()) v = static_cast<T>(rng.uniform(-limit, limit));
    params_[idx + 1].fill(T{0});
  }
}

template <typename T>
template <typename U>
Network<U> Network<T>::cast() const {
  Network<U> out(architecture_, input_h_, input_w_, layers_);
  auto& dst = out.mutable_parameters();
  for (std::size_t i = 0; i < params_.size(); ++i)
    std::transform(params_[i].values().begin(), params_[i].values().end(), dst[i].values().begin(),
                   [](T v) { return static_cast<U>(v); });
  return out;
}

std::vector<std::string> architecture_names() { return {"lenet64", "small", "linear"}; }

std::vector<LayerSpec> architecture_layers(const std::string& name) {
  if (name == "lenet64")
    return {LayerSpec::conv(20, 5),          LayerSpec::maxpool(2, 2), LayerSpec::conv(50, 5),
            LayerSpec::maxpool(2, 2),        LayerSpec::fully_connected(500), LayerSpec::relu(),
            LayerSpec::fully_connected(2),   LayerSpec::softmax_cross_entropy()};
  if (name == "small")
    return {LayerSpec::conv(4, 5, 2),        LayerSpec::maxpool(2, 2),       LayerSpec::fully_connected(16),
            LayerSpec::relu(),               LayerSpec::fully_connected(2),  LayerSpec::softmax_cross_entropy()};
  if (name == "linear") return {LayerSpec::fully_connected(2), LayerSpec::softmax_cross_entropy()};
  throw InvalidArgument("unknown architecture '" + name + "'");
}

template <typename T>
Network<T> make_network(const std::string& architecture, int input_size, std::uint64_t seed) {
  Network<T> net(architecture, input_size, input_size, architecture_layers(architecture));
  net.initialize(seed);
  return net;
}

namespace {

template <typename T>
std::span<const T> cview(const Tensor<T>& t) {
  return t.values();
}

ConvGeometry conv_geometry(const LayerSpec& l, const ActivationShape& in, int batch) {
  return {batch, in.channels, in.height, in.width, l.units, l.kernel, l.stride};
}

PoolGeometry pool_geometry(const LayerSpec& l, const ActivationShape& in, int batch) {
  return {batch, in.channels, in.height, in.width, l.kernel, l.stride};
}

std::vector<std::size_t> batch_shape(int batch, const ActivationShape& s) {
  return {std::size_t(batch), std::size_t(s.channels), std::size_t(s.height), std::size_t(s.width)};
}

}  // namespace

template <typename T>
ForwardCache<T> forward(const Network<T>& net, const Tensor<T>& batch, Backend backend) {
  if (batch.rank() != 4 || batch.dim(1) != 1 || batch.dim(2) != std::size_t(net.input_h()) ||
      batch.dim(3) != std::size_t(net.input_w()) || batch.dim(0) == 0)
    throw ShapeMismatch("batch shape " + shape_string(batch.shape()) + " does not match network input (N, 1, " +
                        std::to_string(net.input_h()) + ", " + std::to_string(net.input_w()) + ")");
  const int n = static_cast<int>(batch.dim(0));
  const bool par = backend == Backend::parallel;
  ForwardCache<T> cache;
  cache.version = net.version();
  cache.owner = &net;
  cache.batch = n;
  cache.activations.reserve(net.layers().size());
  cache.activations.push_back(batch);
  cache.argmax.resize(net.layers().size());
  const auto& params = net.parameters();

  for (std::size_t i = 0; i + 1 < net.layers().size(); ++i) {
    const LayerSpec& l = net.layers()[i];
    const ActivationShape& in_shape = net.shapes()[i];
    Tensor<T> out(batch_shape(n, net.shapes()[i + 1]));
    const Tensor<T>& in = cache.activations.back();
    switch (l.kind) {
      case LayerKind::conv: {
        const int p = net.parameter_index(i);
        const auto g = conv_geometry(l, in_shape, n);
        if (par)
          parallel::conv2d_forward<T>(g, cview(in), cview(params[p]), cview(params[p + 1]), out.values());
        else
          reference::conv2d_forward<T>(g, cview(in), cview(params[p]), cview(params[p + 1]), out.values());
        break;
      }
      case LayerKind::maxpool: {
        const auto g = pool_geometry(l, in_shape, n);
        cache.argmax[i].resize(out.size());
        if (par)
          parallel::maxpool_forward<T>(g, cview(in), out.values(), cache.argmax[i]);
        else
          reference::maxpool_forward<T>(g, cview(in), out.values(), cache.argmax[i]);
        break;
      }
      case LayerKind::fully_connected: {
        const int p = net.parameter_index(i);
        const DenseGeometry g{n, static_cast<int>(in_shape.size()), l.units};
        if (par)
          parallel::dense_forward<T>(g, cview(in), cview(params[p]), cview(params[p + 1]), out.values());
        else
          reference::dense_forward<T>(g, cview(in), cview(params[p]), cview(params[p + 1]), out.values());
        break;
      }
      case LayerKind::relu:
        if (par)
          parallel::relu_forward<T>(cview(in), out.values());
        else
          reference::relu_forward<T>(cview(in), out.values());
        break;
      case LayerKind::softmax_cross_entropy:
        break;
    }
    cache.activations.push_back(std::move(out));
  }
  cache.activations.back().reshape({std::size_t(n), 2});
  return cache;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  if (logits.rank() != 2 || logits.dim(1) != 2) throw ShapeMismatch("softmax expects (N, 2) logits");
  Tensor<T> out(logits.shape());
  for (std::size_t r = 0; r < logits.dim(0); ++r) {
    const double a = logits[2 * r], b = logits[2 * r + 1];
    const double m = std::max(a, b);
    const double ea = std::exp(a - m), eb = std::exp(b - m);
    out[2 * r] = static_cast<T>(ea / (ea + eb));
    out[2 * r + 1] = static_cast<T>(eb / (ea + eb));
  }
  return out;
}

template <typename T>
double cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(1) != 2) throw ShapeMismatch("cross_entropy expects (N, 2) logits");
  if (labels.size() != logits.dim(0)) throw ShapeMismatch("label count does not match batch size");
  double total = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const double a = logits[2 * r], b = logits[2 * r + 1];
    const double m = std::max(a, b);
    const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    total += lse - (labels[r] == 0 ? a : b);
  }
  return total / static_cast<double>(labels.size());
}

template <typename T>
Gradients<T> backward(const Network<T>& net, const ForwardCache<T>& cache, std::span<const int> labels,
                      Backend backend) {
  if (cache.owner != &net || cache.version != net.version())
    throw InvalidArgument("stale forward cache: the network changed after the forward pass");
  const int n = cache.batch;
  if (labels.size() != std::size_t(n)) throw ShapeMismatch("label count does not match batch size");
  for (int label : labels)
    if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
  const bool par = backend == Backend::parallel;

  Gradients<T> grads;
  for (const auto& p : net.parameters()) grads.parameters.emplace_back(p.shape());
  const Tensor<T>& logits = cache.logits();
  grads.loss = cross_entropy(logits, labels);
  grads.logits = softmax(logits);
  for (int r = 0; r < n; ++r) {
    grads.logits[2 * r + labels[r]] -= T{1};
    grads.logits[2 * r] /= static_cast<T>(n);
    grads.logits[2 * r + 1] /= static_cast<T>(n);
  }

  Tensor<T> upstream = grads.logits;
  const auto& params = net.parameters();
  for (std::size_t i = net.layers().size() - 1; i-- > 0;) {
    const LayerSpec& l = net.layers()[i];
    const ActivationShape& in_shape = net.shapes()[i];
    const Tensor<T>& in = cache.activations[i];
    Tensor<T> down;
    if (i > 0) down = Tensor<T>(in.shape());
    std::span<T> down_view = i > 0 ? down.values() : std::span<T>();
    switch (l.kind) {
      case LayerKind::conv: {
        const int p = net.parameter_index(i);
        const auto g = conv_geometry(l, in_shape, n);
        if (par)
          parallel::conv2d_backward<T>(g, cview(in), cview(params[p]), cview(upstream), down_view,
                                       grads.parameters[p].values(), grads.parameters[p + 1].values());
        else
          reference::conv2d_backward<T>(g, cview(in), cview(params[p]), cview(upstream), down_view,
                                        grads.parameters[p].values(), grads.parameters[p + 1].values());
        break;
      }
      case LayerKind::maxpool: {
        const auto g = pool_geometry(l, in_shape, n);
        if (i == 0) break;
        if (par)
          parallel::maxpool_backward<T>(g, cview(upstream), cache.argmax[i], down_view);
        else
          reference::maxpool_backward<T>(g, cview(upstream), cache.argmax[i], down_view);
        break;
      }
      case LayerKind::fully_connected: {
        const int p = net.parameter_index(i);
        const DenseGeometry g{n, static_cast<int>(in_shape.size()), l.units};
        if (par)
          parallel::dense_backward<T>(g, cview(in), cview(params[p]), cview(upstream), down_view,
                                      grads.parameters[p].values(), grads.parameters[p + 1].values());
        else
          reference::dense_backward<T>(g, cview(in), cview(params[p]), cview(upstream), down_view,
                                       grads.parameters[p].values(), grads.parameters[p + 1].values());
        break;
      }
      case LayerKind::relu:
        if (i == 0) break;
        if (par)
          parallel::relu_backward<T>(cview(in), cview(upstream), down_view);
        else
          reference::relu_backward<T>(cview(in), cview(upstream), down_view);
        break;
      case LayerKind::softmax_cross_entropy:
        break;
    }
    if (i == 0) break;
    upstream = std::move(down);
  }
  return grads;
}

template class Network<float>;
template class Network<double>;
template Network<double> Network<float>::cast<double>() const;
template Network<float> Network<double>::cast<float>() const;
template Network<float> Network<float>::cast<float>() const;
template Network<double> Network<double>::cast<double>() const;
template Network<float> make_network<float>(const std::string&, int, std::uint64_t);
template Network<double> make_network<double>(const std::string&, int, std::uint64_t);
template ForwardCache<float> forward<float>(const Network<float>&, const Tensor<float>&, Backend);
template ForwardCache<double> forward<double>(const Network<double>&, const Tensor<double>&, Backend);
template Gradients<float> backward<float>(const Network<float>&, const ForwardCache<float>&, std::span<const int>,
                                          Backend);
template Gradients<double> backward<double>(const Network<double>&, const ForwardCache<double>&,
                                            std::span<const int>, Backend);
template Tensor<float> softmax<float>(const Tensor<float>&);
template Tensor<double> softmax<double>(const Tensor<double>&);
template double cross_entropy<float>(const Tensor<float>&, std::span<const int>);
template double cross_entropy<double>(const Tensor<double>&, std::span<const int>);

}  // namespace svrt::nn
