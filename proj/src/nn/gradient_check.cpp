#include "svrt/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svrt/error.hpp"
#include "svrt/rng.hpp"

namespace svrt::nn {

GradientCheckResult gradient_check(Network<double>& net, const Tensor<double>& batch, std::span<const int> labels,
                                   const GradientCheckOptions& options) {
  if (!(options.step > 0) || options.samples_per_tensor < 1) throw InvalidArgument("bad gradient check options");
  const auto analytic = backward(net, forward(net, batch, options.backend), labels, options.backend);
  const auto loss_at = [&] { return cross_entropy(forward(net, batch, options.backend).logits(), labels); };

  std::vector<std::size_t> owner(net.parameters().size());
  for (std::size_t l = 0; l < net.layers().size(); ++l)
    if (net.parameter_index(l) >= 0) owner[net.parameter_index(l)] = owner[net.parameter_index(l) + 1] = l;

  Rng rng(options.seed);
  GradientCheckResult result;
  for (std::size_t t = 0; t < net.parameters().size(); ++t) {
    const std::size_t size = net.parameters()[t].size();
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t take = std::min<std::size_t>(size, options.samples_per_tensor);
    for (std::size_t i = 0; i < take; ++i)
      std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(size - i) - 1))]);
    idx.resize(take);

    TensorCheck check{t, owner[t], take, 0.0};
    for (std::size_t j : idx) {
      const double original = net.parameters()[t][j];
      net.mutable_parameters()[t][j] = original + options.step;
      const double plus = loss_at();
      net.mutable_parameters()[t][j] = original - options.step;
      const double minus = loss_at();
      net.mutable_parameters()[t][j] = original;
      const double numeric = (plus - minus) / (2 * options.step);
      const double a = analytic.parameters[t][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      check.max_relative_error = std::max(check.max_relative_error, std::abs(a - numeric) / denom);
    }
    result.checked += take;
    result.max_relative_error = std::max(result.max_relative_error, check.max_relative_error);
    result.tensors.push_back(check);
  }
  return result;
}

}  // namespace svrt::nn
