#pragma once

// Per-pixel filtering with predicted kernels. Each output pixel p is
//
//   out(p) = sum_r sum_{i,j} w[p, r, i, j] * img(p + stride_r * (i - c, j - c))
//
// with c = (K-1)/2, clamp-to-edge sampling outside the image, every channel
// filtered with the same weights, and one clamp to [0,1] after the full sum.

#include <cstddef>
#include <span>
#include <vector>

#include "rainlane/image.hpp"

namespace rainlane {

struct DilationScheme {
    std::vector<int> strides;

    int levels() const { return static_cast<int>(strides.size()); }
    void validate() const;

    /// strides 2^r for r = 0 .. levels-1
    static DilationScheme hierarchical(int levels);
};

class KernelField {
public:
    KernelField() = default;
    KernelField(int width, int height, int levels, int ksize);

    int width() const { return width_; }
    int height() const { return height_; }
    int levels() const { return levels_; }
    int ksize() const { return ksize_; }
    int taps() const { return levels_ * ksize_ * ksize_; }
    bool normalized() const { return normalized_; }
    void set_normalized(bool flag) { normalized_ = flag; }

    /// All levels*K*K weights of pixel (row, col), level-major then row-major.
    std::span<const float> taps_at(int row, int col) const {
        return {weights_.data() + offset(row, col), static_cast<std::size_t>(taps())};
    }
    std::span<float> taps_at(int row, int col) {
        return {weights_.data() + offset(row, col), static_cast<std::size_t>(taps())};
    }
    float& at(int row, int col, int level, int i, int j) {
        return weights_[offset(row, col) + (static_cast<std::size_t>(level) * ksize_ + i) * ksize_ + j];
    }
    float at(int row, int col, int level, int i, int j) const {
        return weights_[offset(row, col) + (static_cast<std::size_t>(level) * ksize_ + i) * ksize_ + j];
    }

    std::span<const float> weights() const { return weights_; }
    std::span<float> weights() { return weights_; }

    /// Largest |sum of taps - 1| over all pixels.
    double max_sum_deviation() const;

private:
    std::size_t offset(int row, int col) const {
        return (static_cast<std::size_t>(row) * width_ + col) * static_cast<std::size_t>(taps());
    }

    int width_ = 0;
    int height_ = 0;
    int levels_ = 0;
    int ksize_ = 0;
    bool normalized_ = false;
    std::vector<float> weights_;
};

/// Level-0 center tap 1, everything else 0.
KernelField identity_field(int width, int height, int ksize, int levels);

/// Row-parallel implementation (see parallel.hpp).
ImageBuffer apply_kernel_field(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme);

/// Unoptimized reference with the same contract; used as a test oracle.
ImageBuffer apply_kernel_field_naive(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme);

/// Throws unless (img, field, scheme) satisfy the filtering preconditions.
void check_filter_args(const ImageBuffer& img, const KernelField& field, const DilationScheme& scheme);

}  // namespace rainlane
