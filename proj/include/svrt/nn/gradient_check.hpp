#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svrt/nn/network.hpp"

namespace svrt::nn {

struct GradientCheckOptions {
  double step = 1e-6;  // binary inputs give max-pool near-ties; larger steps cross those kinks
  int samples_per_tensor = 200;  // every entry when the tensor is smaller
  std::uint64_t seed = 0;
  Backend backend = Backend::parallel;
  double floor = 1e-7;  // lower bound of the relative-error denominator
};

struct TensorCheck {
  std::size_t tensor = 0;  // index into Network::parameters()
  std::size_t layer = 0;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::vector<TensorCheck> tensors;
};

/// Compares backward() with central differences of the mean cross-entropy on a random subset of
/// each parameter tensor. Relative error is |a - n| / max(|a|, |n|, floor).
/// The network is restored before returning.
GradientCheckResult gradient_check(Network<double>& net, const Tensor<double>& batch, std::span<const int> labels,
                                   const GradientCheckOptions& options = {});

}  // namespace svrt::nn
