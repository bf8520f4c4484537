#include <algorithm>
#include <limits>

#include "svrt/nn/kernels.hpp"

namespace svrt::nn::reference {

template <typename T>
void conv2d_forward(const ConvGeometry& g, std::span<const T> in, std::span<const T> weights,
                    std::span<const T> bias, std::span<T> out) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int n = 0; n < g.batch; ++n)
    for (int co = 0; co < g.out_channels; ++co)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          T acc = bias[co];
          for (int ci = 0; ci < g.in_channels; ++ci)
            for (int ky = 0; ky < g.kernel; ++ky)
              for (int kx = 0; kx < g.kernel; ++kx) {
                const int iy = oy * g.stride + ky, ix = ox * g.stride + kx;
                acc += weights[((co * g.in_channels + ci) * g.kernel + ky) * g.kernel + kx] *
                       in[((std::size_t(n) * g.in_channels + ci) * g.in_h + iy) * g.in_w + ix];
              }
          out[((std::size_t(n) * g.out_channels + co) * oh + oy) * ow + ox] = acc;
        }
}

template <typename T>
void conv2d_backward(const ConvGeometry& g, std::span<const T> in, std::span<const T> weights,
                     std::span<const T> grad_out, std::span<T> grad_in, std::span<T> grad_weights,
                     std::span<T> grad_bias) {
  const int oh = g.out_h(), ow = g.out_w();
  std::fill(grad_weights.begin(), grad_weights.end(), T{0});
  std::fill(grad_bias.begin(), grad_bias.end(), T{0});
  std::fill(grad_in.begin(), grad_in.end(), T{0});
  const bool want_input = !grad_in.empty();
  for (int n = 0; n < g.batch; ++n)
    for (int co = 0; co < g.out_channels; ++co)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
          const T go = grad_out[((std::size_t(n) * g.out_channels + co) * oh + oy) * ow + ox];
          grad_bias[co] += go;
          for (int ci = 0; ci < g.in_channels; ++ci)
            for (int ky = 0; ky < g.kernel; ++ky)
              for (int kx = 0; kx < g.kernel; ++kx) {
                const int iy = oy * g.stride + ky, ix = ox * g.stride + kx;
                const std::size_t w = ((co * g.in_channels + ci) * g.kernel + ky) * g.kernel + kx;
                const std::size_t i = ((std::size_t(n) * g.in_channels + ci) * g.in_h + iy) * g.in_w + ix;
                grad_weights[w] += go * in[i];
                if (want_input) grad_in[i] += go * weights[w];
              }
        }
}

template <typename T>
void maxpool_forward(const PoolGeometry& g, std::span<const T> in, std::span<T> out,
                     std::span<std::int32_t> argmax) {
  const int oh = g.out_h(), ow = g.out_w();
  for (int p = 0; p < g.batch * g.channels; ++p) {
    const std::size_t plane = std::size_t(p) * g.in_h * g.in_w;
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        T best = -std::numeric_limits<T>::infinity();
        std::int32_t where = 0;
        for (int wy = 0; wy < g.window; ++wy)
          for (int wx = 0; wx < g.window; ++wx) {
            const std::int32_t idx = (oy * g.stride + wy) * g.in_w + ox * g.stride + wx;
            if (in[plane + idx] > best) {
              best = in[plane + idx];
              where = idx;
            }
          }
        const std::size_t o = (std::size_t(p) * oh + oy) * ow + ox;
        out[o] = best;
        argmax[o] = where;
      }
  }
}

template <typename T>
void maxpool_backward(const PoolGeometry& g, std::span<const T> grad_out, std::span<const std::int32_t> argmax,
                      std::span<T> grad_in) {
  const std::size_t out_plane = std::size_t(g.out_h()) * g.out_w();
  const std::size_t in_plane = std::size_t(g.in_h) * g.in_w;
  std::fill(grad_in.begin(), grad_in.end(), T{0});
  for (std::size_t p = 0; p < std::size_t(g.batch) * g.channels; ++p)
    for (std::size_t o = 0; o < out_plane; ++o)
      grad_in[p * in_plane + argmax[p * out_plane + o]] += grad_out[p * out_plane + o];
}

template <typename T>
void dense_forward(const DenseGeometry& g, std::span<const T> in, std::span<const T> weights,
                   std::span<const T> bias, std::span<T> out) {
  for (int n = 0; n < g.batch; ++n)
    for (int o = 0; o < g.out_features; ++o) {
      T acc = bias[o];
      for (int i = 0; i < g.in_features; ++i)
        acc += weights[std::size_t(o) * g.in_features + i] * in[std::size_t(n) * g.in_features + i];
      out[std::size_t(n) * g.out_features + o] = acc;
    }
}

template <typename T>
void dense_backward(const DenseGeometry& g, std::span<const T> in, std::span<const T> weights,
                    std::span<const T> grad_out, std::span<T> grad_in, std::span<T> grad_weights,
                    std::span<T> grad_bias) {
  std::fill(grad_weights.begin(), grad_weights.end(), T{0});
  std::fill(grad_bias.begin(), grad_bias.end(), T{0});
  std::fill(grad_in.begin(), grad_in.end(), T{0});
  const bool want_input = !grad_in.empty();
  for (int n = 0; n < g.batch; ++n)
    for (int o = 0; o < g.out_features; ++o) {
      const T go = grad_out[std::size_t(n) * g.out_features + o];
      grad_bias[o] += go;
      for (int i = 0; i < g.in_features; ++i) {
        grad_weights[std::size_t(o) * g.in_features + i] += go * in[std::size_t(n) * g.in_features + i];
        if (want_input) grad_in[std::size_t(n) * g.in_features + i] += go * weights[std::size_t(o) * g.in_features + i];
      }
    }
}

template <typename T>
void relu_forward(std::span<const T> in, std::span<T> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
}

template <typename T>
void relu_backward(std::span<const T> in, std::span<const T> grad_out, std::span<T> grad_in) {
  for (std::size_t i = 0; i < in.size(); ++i) grad_in[i] = in[i] > T{0} ? grad_out[i] : T{0};
}

#define SVRT_INSTANTIATE(T)                                                                                      \
  template void conv2d_forward<T>(const ConvGeometry&, std::span<const T>, std::span<const T>,                  \
                                  std::span<const T>, std::span<T>);                                             \
  template void conv2d_backward<T>(const ConvGeometry&, std::span<const T>, std::span<const T>,                 \
                                   std::span<const T>, std::span<T>, std::span<T>, std::span<T>);               \
  template void maxpool_forward<T>(const PoolGeometry&, std::span<const T>, std::span<T>,                       \
                                   std::span<std::int32_t>);                                                     \
  template void maxpool_backward<T>(const PoolGeometry&, std::span<const T>, std::span<const std::int32_t>,     \
                                    std::span<T>);                                                               \
  template void dense_forward<T>(const DenseGeometry&, std::span<const T>, std::span<const T>,                  \
                                 std::span<const T>, std::span<T>);                                              \
  template void dense_backward<T>(const DenseGeometry&, std::span<const T>, std::span<const T>,                 \
                                  std::span<const T>, std::span<T>, std::span<T>, std::span<T>);                \
  template void relu_forward<T>(std::span<const T>, std::span<T>);                                              \
  template void relu_backward<T>(std::span<const T>, std::span<const T>, std::span<T>);

SVRT_INSTANTIATE(float)
SVRT_INSTANTIATE(double)

}  // namespace svrt::nn::reference
