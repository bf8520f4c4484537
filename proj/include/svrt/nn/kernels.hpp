#pragma once

// Layer kernels in two interchangeable implementations:
//   reference  straightforward serial loops, kept as the test oracle
//   parallel   im2col + GEMM (Eigen) with OpenMP over images / column blocks
// Backward kernels overwrite (never accumulate into) their gradient outputs.
// An empty grad_in span skips the input gradient.

#include <cstdint>
#include <span>

namespace svrt::nn {

enum class Backend { reference, parallel };

struct ConvGeometry {
  int batch = 1;
  int in_channels = 1;
  int in_h = 1;
  int in_w = 1;
  int out_channels = 1;
  int kernel = 1;
  int stride = 1;
  int out_h() const { return (in_h - kernel) / stride + 1; }
  int out_w() const { return (in_w - kernel) / stride + 1; }
};

struct PoolGeometry {
  int batch = 1;
  int channels = 1;
  int in_h = 1;
  int in_w = 1;
  int window = 2;
  int stride = 2;
  int out_h() const { return (in_h - window) / stride + 1; }
  int out_w() const { return (in_w - window) / stride + 1; }
};

struct DenseGeometry {
  int batch = 1;
  int in_features = 1;
  int out_features = 1;
};

#define SVRT_KERNEL_DECLARATIONS                                                                                    \
  template <typename T>                                                                                             \
  void conv2d_forward(const ConvGeometry& g, std::span<const T> in, std::span<const T> weights,                    \
                      std::span<const T> bias, std::span<T> out);                                                   \
  template <typename T>                                                                                             \
  void conv2d_backward(const ConvGeometry& g, std::span<const T> in, std::span<const T> weights,                   \
                       std::span<const T> grad_out, std::span<T> grad_in, std::span<T> grad_weights,                \
                       std::span<T> grad_bias);                                                                     \
  template <typename T>                                                                                             \
  void maxpool_forward(const PoolGeometry& g, std::span<const T> in, std::span<T> out,                             \
                       std::span<std::int32_t> argmax);                                                             \
  template <typename T>                                                                                             \
  void maxpool_backward(const PoolGeometry& g, std::span<const T> grad_out, std::span<const std::int32_t> argmax,   \
                        std::span<T> grad_in);                                                                      \
  template <typename T>                                                                                             \
  void dense_forward(const DenseGeometry& g, std::span<const T> in, std::span<const T> weights,                    \
                     std::span<const T> bias, std::span<T> out);                                                    \
  template <typename T>                                                                                             \
  void dense_backward(const DenseGeometry& g, std::span<const T> in, std::span<const T> weights,                   \
                      std::span<const T> grad_out, std::span<T> grad_in, std::span<T> grad_weights,                 \
                      std::span<T> grad_bias);                                                                      \
  template <typename T>                                                                                             \
  void relu_forward(std::span<const T> in, std::span<T> out);                                                       \
  template <typename T>                                                                                             \
  void relu_backward(std::span<const T> in, std::span<const T> grad_out, std::span<T> grad_in);

namespace reference {
SVRT_KERNEL_DECLARATIONS
}

namespace parallel {
SVRT_KERNEL_DECLARATIONS
}

#undef SVRT_KERNEL_DECLARATIONS

}  // namespace svrt::nn
