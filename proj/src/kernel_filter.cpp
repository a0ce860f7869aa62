#include "rainlane/kernel_filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rainlane/error.hpp"
#include "rainlane/parallel.hpp"

namespace rainlane {

void DilationScheme::validate() const {
    if (strides.empty()) throw InvalidArgument("dilation scheme needs at least one level");
    for (std::size_t i = 0; i < strides.size(); ++i) {
        if (strides[i] < 1) throw InvalidArgument("dilation strides must be positive");
        if (i > 0 && strides[i] <= strides[i - 1]) {
            throw InvalidArgument("dilation strides must be strictly increasing");
        }
    }
}

DilationScheme DilationScheme::hierarchical(int levels) {
    if (levels < 1 || levels > 16) throw InvalidArgument("dilation levels must lie in [1,16]");
    DilationScheme s;
    for (int r = 0; r < levels; ++r) s.strides.push_back(1 << r);
    return s;
}

KernelField::KernelField(int width, int height, int levels, int ksize)
    : width_(width), height_(height), levels_(levels), ksize_(ksize) {
    if (width < 1 || height < 1) throw InvalidArgument("kernel field dimensions must be positive");
    if (levels < 1) throw InvalidArgument("kernel field needs at least one level");
    if (ksize < 1 || ksize % 2 == 0) {
        throw InvalidArgument("kernel size must be odd and >= 1, got " + std::to_string(ksize));
    }
    weights_.assign(static_cast<std::size_t>(width) * height * taps(), 0.0f);
}

double KernelField::max_sum_deviation() const {
    double worst = 0.0;
    const std::size_t t = static_cast<std::size_t>(taps());
    for (std::size_t off = 0; off < weights_.size(); off += t) {
        double s = 0.0;
        for (std::size_t k = 0; k < t; ++k) s += weights_[off + k];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

KernelField identity_field(int width, int height, int ksize, int levels) {
    KernelField field(width, height, levels, ksize);
    const int c = (ksize - 1) / 2;
    for (int r = 0; r < height; ++r) {
        for (int col = 0; col < width; ++col) field.at(r, col, 0, c, c) = 1.0f;
    }
    field.set_normalized(true);
    return field;
}

void check_filter_args(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme) {
    if (img.empty()) throw InvalidArgument("cannot filter an empty image");
    if (field.width() != img.width() || field.height() != img.height()) {
        throw DataError("kernel field " + std::to_string(field.width()) + "x" + std::to_string(field.height()) +
                        " does not match image " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()));
    }
    scheme.validate();
    if (scheme.levels() != field.levels()) {
        throw DataError("dilation scheme has " + std::to_string(scheme.levels()) + " levels, kernel field has " +
                        std::to_string(field.levels()));
    }
    const int reach = scheme.strides.back() * (field.ksize() - 1) / 2;
    if (reach >= std::max(img.width(), img.height())) {
        throw InvalidArgument("dilated kernel reach " + std::to_string(reach) + " is not smaller than the image");
    }
}

ImageBuffer apply_kernel_field_naive(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme) {
    check_filter_args(img, field, scheme);
    const int H = img.height(), W = img.width(), C = img.channels();
    const int K = field.ksize(), c = (K - 1) / 2;
    ImageBuffer out(W, H, C);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            for (int ch = 0; ch < C; ++ch) {
                double acc = 0.0;
                for (int r = 0; r < field.levels(); ++r) {
                    const int s = scheme.strides[r];
                    for (int i = 0; i < K; ++i) {
                        for (int j = 0; j < K; ++j) {
                            const int yy = std::clamp(y + s * (i - c), 0, H - 1);
                            const int xx = std::clamp(x + s * (j - c), 0, W - 1);
                            acc += static_cast<double>(field.at(y, x, r, i, j)) * img.at(yy, xx, ch);
                        }
                    }
                }
                out.at(y, x, ch) = std::clamp(acc, 0.0, 1.0);
            }
        }
    }
    return out;
}

namespace {

template <int C>
void filter_rows(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme,
                 const std::vector<int>& col_index, int y0, int y1, ImageBuffer& out) {
    const int H = img.height(), W = img.width();
    const int K = field.ksize(), c = (K - 1) / 2, L = field.levels();
    const double* src = img.data().data();
    double* dst = out.data().data();
    std::vector<const double*> rows(static_cast<std::size_t>(L) * K);
    for (int y = y0; y < y1; ++y) {
        for (int r = 0; r < L; ++r) {
            for (int i = 0; i < K; ++i) {
                const int yy = std::clamp(y + scheme.strides[r] * (i - c), 0, H - 1);
                rows[static_cast<std::size_t>(r) * K + i] = src + static_cast<std::size_t>(yy) * W * C;
            }
        }
        for (int x = 0; x < W; ++x) {
            const float* w = field.taps_at(y, x).data();
            const int* cols = col_index.data() + static_cast<std::size_t>(x) * L * K;
            double acc[C] = {};
            for (int r = 0; r < L; ++r) {
                for (int i = 0; i < K; ++i) {
                    const double* row = rows[static_cast<std::size_t>(r) * K + i];
                    for (int j = 0; j < K; ++j, ++w) {
                        const double* px = row + static_cast<std::size_t>(cols[r * K + j]) * C;
                        const double wv = *w;
                        for (int ch = 0; ch < C; ++ch) acc[ch] += wv * px[ch];
                    }
                }
            }
            double* o = dst + (static_cast<std::size_t>(y) * W + x) * C;
            for (int ch = 0; ch < C; ++ch) o[ch] = std::clamp(acc[ch], 0.0, 1.0);
        }
    }
}

}  // namespace

ImageBuffer apply_kernel_field(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme) {
    check_filter_args(img, field, scheme);
    const int W = img.width(), K = field.ksize(), c = (K - 1) / 2, L = field.levels();
    // col_index[(x * L + r) * K + j]: clamped source column of tap j at level r.
    std::vector<int> col_index(static_cast<std::size_t>(W) * L * K);
    for (int x = 0; x < W; ++x) {
        for (int r = 0; r < L; ++r) {
            for (int j = 0; j < K; ++j) {
                col_index[(static_cast<std::size_t>(x) * L + r) * K + j] =
                    std::clamp(x + scheme.strides[r] * (j - c), 0, W - 1);
            }
        }
    }
    ImageBuffer out(img.width(), img.height(), img.channels());
    parallel_for(img.height(), [&](int y0, int y1) {
        if (img.channels() == 3) {
            filter_rows<3>(img, field, scheme, col_index, y0, y1, out);
        } else {
            filter_rows<1>(img, field, scheme, col_index, y0, y1, out);
        }
    });
    return out;
}

}  // namespace rainlane
