#pragma once

// Planar feature maps and 2-D convolution (stride 1, clamp-to-edge padding)
// lowered to GEMM through im2col.

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "rainlane/image.hpp"

namespace rainlane::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;  // [channel][row][col]

    Tensor() = default;
    Tensor(int c, int h, int w) : channels(c), height(h), width(w), values(static_cast<std::size_t>(c) * h * w) {}

    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
    double* channel(int c) { return values.data() + plane() * c; }
    const double* channel(int c) const { return values.data() + plane() * c; }
};

Tensor to_planar(const ImageBuffer& img);
Tensor planar_rows(const ImageBuffer& img, int row0, int rows);

/// col has cin*k*k rows and h*w columns.
void im2col(const Tensor& in, int k, RowMatrix& col);

/// Accumulates col-shaped gradients back into `din` (same shape as the input).
void col2im(const RowMatrix& dcol, int k, Tensor& din);

/// weights are laid out [cout][cin][k][k].
Tensor conv_forward(const Tensor& in, const double* weights, const double* bias, int cout, int k, RowMatrix& col);

/// Adds dL/dW and dL/db into dweights/dbias; writes dL/din when din != nullptr.
void conv_backward(const RowMatrix& col, const Tensor& dout, const double* weights, int cin, int k,
                   double* dweights, double* dbias, Tensor* din, int height, int width);

}  // namespace rainlane::detail
