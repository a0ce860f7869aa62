#include "rainlane/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rainlane/error.hpp"

namespace rainlane {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
    std::vector<double> g(kWindow);
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double x = i - kWindow / 2;
        g[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

// Separable valid-region filtering of a w x h plane: output (w-10) x (h-10).
std::vector<double> blur_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& g) {
    const int ow = w - kWindow + 1, oh = h - kWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
            tmp[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += g[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) throw DataError("psnr: image shapes differ");
    if (a.empty()) throw InvalidArgument("psnr: empty images");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse < 1e-10) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_dims(b) || a.channels() != b.channels()) throw DataError("ssim: image shapes differ");
    if (a.width() < kWindow || a.height() < kWindow) {
        throw InvalidArgument("ssim: images must be at least 11x11, got " + std::to_string(a.width()) + "x" +
                              std::to_string(a.height()));
    }
    const ImageBuffer ga = luma(a), gb = luma(b);
    const int w = a.width(), h = a.height();
    const std::vector<double> x(ga.data().begin(), ga.data().end());
    const std::vector<double> y(gb.data().begin(), gb.data().end());
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto g = gaussian_window();
    const auto mx = blur_valid(x, w, h, g), my = blur_valid(y, w, h, g);
    const auto sxx = blur_valid(xx, w, h, g), syy = blur_valid(yy, w, h, g), sxy = blur_valid(xy, w, h, g);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        total += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
    }
    return total / static_cast<double>(mx.size());
}

ReconMetrics recon_metrics(const ImageBuffer& restored, const ImageBuffer& clean) {
    return ReconMetrics{psnr(restored, clean), ssim(restored, clean)};
}

DepthMap::DepthMap(int w, int h, double fill)
    : width(w), height(h), depth(static_cast<std::size_t>(w) * h, fill),
      valid(static_cast<std::size_t>(w) * h, fill > 0.0 && std::isfinite(fill)) {
    if (w < 1 || h < 1) throw InvalidArgument("depth map dimensions must be positive");
}

void DepthMap::set(int row, int col, double d) {
    const std::size_t i = static_cast<std::size_t>(row) * width + col;
    depth[i] = d;
    valid[i] = d > 0.0 && std::isfinite(d);
}

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, double cap) {
    if (pred.width != gt.width || pred.height != gt.height) throw DataError("depth_metrics: map dimensions differ");
    if (!(cap > kMinDepth)) throw InvalidArgument("depth cap must exceed 1e-3 m");
    DepthMetrics m;
    double sq = 0.0, sq_log = 0.0;
    std::size_t d1 = 0, d2 = 0, d3 = 0;
    for (std::size_t i = 0; i < gt.depth.size(); ++i) {
        if (!gt.valid[i]) continue;
        const double t = std::clamp(gt.depth[i], kMinDepth, cap);
        double p = pred.depth[i];
        if (!std::isfinite(p)) p = kMinDepth;
        p = std::clamp(p, kMinDepth, cap);
        const double diff = p - t;
        m.abs_rel += std::abs(diff) / t;
        m.sq_rel += diff * diff / t;
        sq += diff * diff;
        const double ld = std::log(p) - std::log(t);
        sq_log += ld * ld;
        m.log10 += std::abs(std::log10(p) - std::log10(t));
        // max(p/t, t/p) < th, compared without dividing so p = th * t lands exactly on the boundary.
        auto within = [&](double th) { return p < th * t && t < th * p; };
        d1 += within(1.25);
        d2 += within(1.25 * 1.25);
        d3 += within(1.25 * 1.25 * 1.25);
        ++m.pixels;
    }
    if (m.pixels == 0) throw DataError("depth_metrics: ground truth has no valid pixels");
    const double n = static_cast<double>(m.pixels);
    m.abs_rel /= n;
    m.sq_rel /= n;
    m.rmse = std::sqrt(sq / n);
    m.rmse_log = std::sqrt(sq_log / n);
    m.log10 /= n;
    m.delta1 = static_cast<double>(d1) / n;
    m.delta2 = static_cast<double>(d2) / n;
    m.delta3 = static_cast<double>(d3) / n;
    return m;
}

DepthMetrics mean_metrics(const std::vector<DepthMetrics>& items) {
    DepthMetrics m;
    if (items.empty()) return m;
    for (const DepthMetrics& it : items) {
        m.abs_rel += it.abs_rel;
        m.sq_rel += it.sq_rel;
        m.rmse += it.rmse;
        m.rmse_log += it.rmse_log;
        m.log10 += it.log10;
        m.delta1 += it.delta1;
        m.delta2 += it.delta2;
        m.delta3 += it.delta3;
        m.pixels += it.pixels;
    }
    const double n = static_cast<double>(items.size());
    m.abs_rel /= n;
    m.sq_rel /= n;
    m.rmse /= n;
    m.rmse_log /= n;
    m.log10 /= n;
    m.delta1 /= n;
    m.delta2 /= n;
    m.delta3 /= n;
    return m;
}

}  // namespace rainlane
