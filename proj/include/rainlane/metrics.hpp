#pragma once

#include <filesystem>
#include <vector>

#include "rainlane/image.hpp"

namespace rainlane {

inline constexpr double kPsnrCap = 100.0;

struct ReconMetrics {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

/// 10 log10(1 / MSE) on unit-interval data, capped at 100 dB when MSE < 1e-10.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Single-scale SSIM on luma: 11x11 Gaussian window (sigma 1.5), K1 0.01,
/// K2 0.03, L 1, averaged over all fully contained window positions.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

ReconMetrics recon_metrics(const ImageBuffer& restored, const ImageBuffer& clean);

struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> depth;  // meters
    std::vector<bool> valid;

    DepthMap() = default;
    DepthMap(int w, int h, double fill = 0.0);

    double at(int row, int col) const { return depth[static_cast<std::size_t>(row) * width + col]; }
    /// Sets the depth and marks the pixel valid iff d > 0 and finite.
    void set(int row, int col, double d);
};

struct DepthMetrics {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;
    double log10 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    std::size_t pixels = 0;
};

inline constexpr double kDefaultDepthCap = 80.0;
inline constexpr double kMinDepth = 1e-3;

/// Errors over pixels valid in `gt`, both depths clamped to [1e-3, cap].
/// Threshold accuracies use the strict test max(d/d*, d*/d) < 1.25^i.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, double cap = kDefaultDepthCap);

/// Unweighted mean over images.
DepthMetrics mean_metrics(const std::vector<DepthMetrics>& items);

/// 16-bit single channel PNG, depth = raw / 256 m, raw 0 marks an invalid pixel.
DepthMap load_depth_png(const std::filesystem::path& path);
void save_depth_png(const DepthMap& map, const std::filesystem::path& path);

}  // namespace rainlane
