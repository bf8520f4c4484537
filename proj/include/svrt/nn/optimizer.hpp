#pragma once

#include <cstdint>
#include <vector>

#include "svrt/nn/tensor.hpp"

namespace svrt::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // L2 coefficient added to the gradient before the moment updates
  bool operator==(const AdamConfig&) const = default;
};

/// ADAM moments for one parameter list.
template <typename T>
class AdamState {
 public:
  AdamState(const std::vector<Tensor<T>>& params, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  std::int64_t step_count() const { return t_; }
  const std::vector<Tensor<T>>& first_moment() const { return m_; }
  const std::vector<Tensor<T>>& second_moment() const { return v_; }

  /// One update of params in place. Throws NumericalError on a non-finite gradient (nothing is
  /// modified in that case) and ShapeMismatch when shapes disagree.
  void step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads);

  bool operator==(const AdamState&) const = default;

 private:
  AdamConfig config_;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
  std::int64_t t_ = 0;
};

}  // namespace svrt::nn
