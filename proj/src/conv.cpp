#include "conv.hpp"

#include <algorithm>

namespace rainlane::detail {

Tensor to_planar(const ImageBuffer& img) { return planar_rows(img, 0, img.height()); }

Tensor planar_rows(const ImageBuffer& img, int row0, int rows) {
    const int C = img.channels(), W = img.width();
    Tensor t(C, rows, W);
    const double* src = img.data().data() + static_cast<std::size_t>(row0) * W * C;
    for (std::size_t p = 0; p < t.plane(); ++p) {
        for (int c = 0; c < C; ++c) t.values[t.plane() * c + p] = src[p * C + c];
    }
    return t;
}

void im2col(const Tensor& in, int k, RowMatrix& col) {
    const int H = in.height, W = in.width, half = k / 2;
    col.resize(static_cast<Eigen::Index>(in.channels) * k * k, static_cast<Eigen::Index>(H) * W);
    std::vector<int> cols(W);
    for (int c = 0; c < in.channels; ++c) {
        const double* src = in.channel(c);
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                double* dst = col.row((static_cast<Eigen::Index>(c) * k + ky) * k + kx).data();
                for (int x = 0; x < W; ++x) cols[x] = std::clamp(x + kx - half, 0, W - 1);
                for (int y = 0; y < H; ++y) {
                    const double* srow = src + static_cast<std::size_t>(std::clamp(y + ky - half, 0, H - 1)) * W;
                    double* drow = dst + static_cast<std::size_t>(y) * W;
                    for (int x = 0; x < W; ++x) drow[x] = srow[cols[x]];
                }
            }
        }
    }
}

void col2im(const RowMatrix& dcol, int k, Tensor& din) {
    const int H = din.height, W = din.width, half = k / 2;
    std::vector<int> cols(W);
    for (int c = 0; c < din.channels; ++c) {
        double* dst = din.channel(c);
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const double* src = dcol.row((static_cast<Eigen::Index>(c) * k + ky) * k + kx).data();
                for (int x = 0; x < W; ++x) cols[x] = std::clamp(x + kx - half, 0, W - 1);
                for (int y = 0; y < H; ++y) {
                    double* drow = dst + static_cast<std::size_t>(std::clamp(y + ky - half, 0, H - 1)) * W;
                    const double* srow = src + static_cast<std::size_t>(y) * W;
                    for (int x = 0; x < W; ++x) drow[cols[x]] += srow[x];
                }
            }
        }
    }
}

Tensor conv_forward(const Tensor& in, const double* weights, const double* bias, int cout, int k, RowMatrix& col) {
    im2col(in, k, col);
    const Eigen::Index kk = static_cast<Eigen::Index>(in.channels) * k * k;
    Eigen::Map<const RowMatrix> w(weights, cout, kk);
    Tensor out(cout, in.height, in.width);
    Eigen::Map<RowMatrix> o(out.values.data(), cout, static_cast<Eigen::Index>(out.plane()));
    o.noalias() = w * col;
    for (int c = 0; c < cout; ++c) o.row(c).array() += bias[c];
    return out;
}

void conv_backward(const RowMatrix& col, const Tensor& dout, const double* weights, int cin, int k,
                   double* dweights, double* dbias, Tensor* din, int height, int width) {
    const Eigen::Index kk = static_cast<Eigen::Index>(cin) * k * k;
    const int cout = dout.channels;
    Eigen::Map<const RowMatrix> d(dout.values.data(), cout, static_cast<Eigen::Index>(dout.plane()));
    Eigen::Map<RowMatrix> dw(dweights, cout, kk);
    dw.noalias() += d * col.transpose();
    for (int c = 0; c < cout; ++c) dbias[c] += d.row(c).sum();
    if (din) {
        Eigen::Map<const RowMatrix> w(weights, cout, kk);
        RowMatrix dcol = w.transpose() * d;
        *din = Tensor(cin, height, width);
        col2im(dcol, k, *din);
    }
}

}  // namespace rainlane::detail
