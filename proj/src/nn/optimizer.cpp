#include "svrt/nn/optimizer.hpp"

#include <cmath>

#include "svrt/error.hpp"

namespace svrt::nn {

template <typename T>
AdamState<T>::AdamState(const std::vector<Tensor<T>>& params, AdamConfig config) : config_(config) {
  if (!(config.learning_rate > 0) || config.beta1 < 0 || config.beta1 >= 1 || config.beta2 < 0 ||
      config.beta2 >= 1 || !(config.epsilon > 0) || config.weight_decay < 0)
    throw InvalidArgument("invalid ADAM configuration");
  for (const auto& p : params) {
    m_.emplace_back(p.shape());
    v_.emplace_back(p.shape());
  }
}

template <typename T>
void AdamState<T>::step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw ShapeMismatch("parameter and gradient lists do not match the optimizer state");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != m_[i].shape() || grads[i].shape() != m_[i].shape())
      throw ShapeMismatch("tensor " + std::to_string(i) + ": expected " + shape_string(m_[i].shape()));
    if (!grads[i].all_finite()) throw NumericalError("non-finite gradient in tensor " + std::to_string(i));
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  // Per-element arithmetic stays in T so the loop vectorizes.
  const T lr = static_cast<T>(config_.learning_rate), eps = static_cast<T>(config_.epsilon);
  const T wd = static_cast<T>(config_.weight_decay);
  const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
  const T ob1 = static_cast<T>(1.0 - b1), ob2 = static_cast<T>(1.0 - b2);
  const T inv_c1 = static_cast<T>(1.0 / c1), inv_c2 = static_cast<T>(1.0 / c2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    T* theta = params[i].data();
    T* m = m_[i].data();
    T* v = v_[i].data();
    const T* g = grads[i].data();
    const std::size_t n = params[i].size();
    for (std::size_t j = 0; j < n; ++j) {
      const T gj = g[j] + wd * theta[j];
      m[j] = tb1 * m[j] + ob1 * gj;
      v[j] = tb2 * v[j] + ob2 * gj * gj;
      theta[j] -= lr * (m[j] * inv_c1) / (std::sqrt(v[j] * inv_c2) + eps);
    }
  }
}

template class AdamState<float>;
template class AdamState<double>;

}  // namespace svrt::nn
