#include <Eigen/Core>
#include <algorithm>
#include <limits>
#include <vector>

#include <omp.h>

#include "svrt/nn/aligned.hpp"
#include "svrt/nn/kernels.hpp"

namespace svrt::nn::parallel {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Mat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMat = Eigen::Map<const RowMat<T>>;

struct Block {
  Eigen::Index begin;
  Eigen::Index size;
};

// Contiguous blocks, one per thread; the split depends only on the thread count.
std::vector<Block> split(Eigen::Index total, int parts) {
  parts = std::max(1, std::min<int>(parts, static_cast<int>(total)));
  std::vector<Block> out;
  for (int p = 0; p < parts; ++p) {
    const Eigen::Index b = total * p / parts, e = total * (p + 1) / parts;
    out.push_back({b, e - b});
  }
  return out;
}

// Images [begin, end) handled by thread t of `threads`; depends only on the thread count.
Block image_range(int batch, int t, int threads) {
  const Eigen::Index b = Eigen::Index(batch) * t / threads, e = Eigen::Index(batch) * (t + 1) / threads;
  return {b, e - b};
}

// cols is K x P for one image: row (ci, ky, kx), column (oy, ox).
template <typename T>
void im2col(const ConvGeometry& g, const T* image, T* cols) {
  const int oh = g.out_h(), ow = g.out_w();
  const std::size_t P = std::size_t(oh) * ow;
  for (int ci = 0; ci < g.in_channels; ++ci)
    for (int ky = 0; ky < g.kernel; ++ky)
      for (int kx = 0; kx < g.kernel; ++kx) {
        T* dst = cols + ((std::size_t(ci) * g.kernel + ky) * g.kernel + kx) * P;
        for (int oy = 0; oy < oh; ++oy) {
          const T* src = image + (std::size_t(ci) * g.in_h + oy * g.stride + ky) * g.in_w + kx;
          if (g.stride == 1)
            std::copy_n(src, ow, dst + oy * ow);
          else
            for (int ox = 0; ox < ow; ++ox) dst[oy * ow + ox] = src[ox * g.stride];
        }
      }
}

template <typename T>
void col2im(const ConvGeometry& g, const T* cols, T* grad_image) {
  const int oh = g.out_h(), ow = g.out_w();
  const std::size_t P = std::size_t(oh) * ow;
  std::fill_n(grad_image, std::size_t(g.in_channels) * g.in_h * g.in_w, T{0});
  for (int ci = 0; ci < g.in_channels; ++ci)
    for (int ky = 0; ky < g.kernel; ++ky)
      for (int kx = 0; kx < g.kernel; ++kx) {
        const T* src = cols + ((std::size_t(ci) * g.kernel + ky) * g.kernel + kx) * P;
        for (int oy = 0; oy < oh; ++oy) {
          T* dst = grad_image + (std::size_t(ci) * g.in_h + oy * g.stride + ky) * g.in_w + kx;
          for (int ox = 0; ox < ow; ++ox) dst[ox * g.stride] += src[oy * ow + ox];
        }
      }
}

}  // namespace

template <typename T>
void conv2d_forward(const ConvGeometry& g, std::span<const T> in, std::span<const T> weights,
                    std::span<const T> bias, std::span<T> out) {
  const Eigen::Index K = Eigen::Index(g.in_channels) * g.kernel * g.kernel;
  const Eigen::Index P = Eigen::Index(g.out_h()) * g.out_w();
  const std::size_t in_image = std::size_t(g.in_channels) * g.in_h * g.in_w;
  ConstMat<T> W(weights.data(), g.out_channels, K);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias.data(), g.out_channels);
#pragma omp parallel
  {
    AlignedVector<T> cols(K * P);
#pragma omp for schedule(static)
    for (int n = 0; n < g.batch; ++n) {
      im2col(g, in.data() + n * in_image, cols.data());
      Mat<T> Y(out.data() + std::size_t(n) * g.out_channels * P, g.out_channels, P);
      Y.noalias() = W * ConstMat<T>(cols.data(), K, P);
      Y.colwise() += b;
    }
  }
}

template <typename T>
void conv2d_backward(const ConvGeometry& g, std::span<const T> in, std::span<const T> weights,
                     std::span<const T> grad_out, std::span<T> grad_in, std::span<T> grad_weights,
                     std::span<T> grad_bias) {
  const Eigen::Index K = Eigen::Index(g.in_channels) * g.kernel * g.kernel;
  const Eigen::Index P = Eigen::Index(g.out_h()) * g.out_w();
  const Eigen::Index CO = g.out_channels;
  const std::size_t in_image = std::size_t(g.in_channels) * g.in_h * g.in_w;
  const bool want_input = !grad_in.empty();
  ConstMat<T> W(weights.data(), CO, K);
  const int threads = std::max(1, std::min(omp_get_max_threads(), g.batch));
  std::vector<RowMat<T>> partial_w(threads, RowMat<T>::Zero(CO, K));
  std::vector<Eigen::Matrix<T, Eigen::Dynamic, 1>> partial_b(threads, Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(CO));
#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    const Block mine = image_range(g.batch, t, threads);
    AlignedVector<T> cols(K * P);
    AlignedVector<T> dcols(want_input ? K * P : 0);
    for (Eigen::Index n = mine.begin; n < mine.begin + mine.size; ++n) {
      im2col(g, in.data() + n * in_image, cols.data());
      ConstMat<T> dY(grad_out.data() + std::size_t(n) * CO * P, CO, P);
      ConstMat<T> C(cols.data(), K, P);
      partial_w[t].noalias() += dY * C.transpose();
      partial_b[t] += dY.rowwise().sum();
      if (want_input) {
        Mat<T>(dcols.data(), K, P).noalias() = W.transpose() * dY;
        col2im(g, dcols.data(), grad_in.data() + n * in_image);
      }
    }
  }
  Mat<T> dW(grad_weights.data(), CO, K);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(grad_bias.data(), CO);
  dW = partial_w[0];
  db = partial_b[0];
  for (int t = 1; t < threads; ++t) {
    dW += partial_w[t];
    db += partial_b[t];
  }
}

template <typename T>
void maxpool_forward(const PoolGeometry& g, std::span<const T> in, std::span<T> out,
                     std::span<std::int32_t> argmax) {
  const int oh = g.out_h(), ow = g.out_w();
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.batch * g.channels; ++p) {
    const T* plane = in.data() + std::size_t(p) * g.in_h * g.in_w;
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        T best = -std::numeric_limits<T>::infinity();
        std::int32_t where = 0;
        for (int wy = 0; wy < g.window; ++wy)
          for (int wx = 0; wx < g.window; ++wx) {
            const std::int32_t idx = (oy * g.stride + wy) * g.in_w + ox * g.stride + wx;
            if (plane[idx] > best) {
              best = plane[idx];
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
#pragma omp parallel for schedule(static)
  for (int p = 0; p < g.batch * g.channels; ++p) {
    T* dst = grad_in.data() + std::size_t(p) * in_plane;
    std::fill_n(dst, in_plane, T{0});
    for (std::size_t o = 0; o < out_plane; ++o)
      dst[argmax[p * out_plane + o]] += grad_out[p * out_plane + o];
  }
}

template <typename T>
void dense_forward(const DenseGeometry& g, std::span<const T> in, std::span<const T> weights,
                   std::span<const T> bias, std::span<T> out) {
  ConstMat<T> X(in.data(), g.batch, g.in_features);
  ConstMat<T> W(weights.data(), g.out_features, g.in_features);
  Mat<T> Y(out.data(), g.batch, g.out_features);
  const auto blocks = split(g.out_features, omp_get_max_threads());
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto Yb = Y.middleCols(blocks[b].begin, blocks[b].size);
    Yb.noalias() = X * W.middleRows(blocks[b].begin, blocks[b].size).transpose();
    for (Eigen::Index o = 0; o < blocks[b].size; ++o) Yb.col(o).array() += bias[blocks[b].begin + o];
  }
}

template <typename T>
void dense_backward(const DenseGeometry& g, std::span<const T> in, std::span<const T> weights,
                    std::span<const T> grad_out, std::span<T> grad_in, std::span<T> grad_weights,
                    std::span<T> grad_bias) {
  ConstMat<T> X(in.data(), g.batch, g.in_features);
  ConstMat<T> W(weights.data(), g.out_features, g.in_features);
  ConstMat<T> dY(grad_out.data(), g.batch, g.out_features);
  Mat<T> dW(grad_weights.data(), g.out_features, g.in_features);
  for (int o = 0; o < g.out_features; ++o) grad_bias[o] = dY.col(o).sum();

  const auto out_blocks = split(g.out_features, omp_get_max_threads());
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < out_blocks.size(); ++b)
    dW.middleRows(out_blocks[b].begin, out_blocks[b].size).noalias() =
        dY.middleCols(out_blocks[b].begin, out_blocks[b].size).transpose() * X;

  if (grad_in.empty()) return;
  Mat<T> dX(grad_in.data(), g.batch, g.in_features);
  const auto in_blocks = split(g.in_features, omp_get_max_threads());
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < in_blocks.size(); ++b)
    dX.middleCols(in_blocks[b].begin, in_blocks[b].size).noalias() =
        dY * W.middleCols(in_blocks[b].begin, in_blocks[b].size);
}

template <typename T>
void relu_forward(std::span<const T> in, std::span<T> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
}

template <typename T>
void relu_backward(std::span<const T> in, std::span<const T> grad_out, std::span<T> grad_in) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) grad_in[i] = in[i] > T{0} ? grad_out[i] : T{0};
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

}  // namespace svrt::nn::parallel
