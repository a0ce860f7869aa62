#include "rainlane/rcflane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "rainlane/error.hpp"
#include "rainlane/parallel.hpp"
#include "rainlane/random.hpp"

namespace rainlane {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

// Line kernel of length `length` along `angle_deg`, with a Gaussian cross
// profile (sigma 0.5 px), normalized to unit sum. Returned row-major, side 2*half+1.
std::vector<double> line_kernel(int length, double angle_deg, int& half) {
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double reach = (length - 1) / 2.0 + 0.5;
    half = static_cast<int>(std::ceil((length - 1) / 2.0)) + 1;
    const int side = 2 * half + 1;
    std::vector<double> k(static_cast<std::size_t>(side) * side, 0.0);
    double sum = 0.0;
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            // Screen y points down, so the streak direction is (cos, -sin) in (col, row).
            const double along = dc * ct - dr * st;
            const double across = -dc * st - dr * ct;
            if (std::abs(along) > reach) continue;
            const double w = std::exp(-across * across / (2.0 * 0.25));
            k[static_cast<std::size_t>(dr + half) * side + (dc + half)] = w;
            sum += w;
        }
    }
    for (double& w : k) w /= sum;
    return k;
}

}  // namespace

void RainLayerConfig::validate() const {
    require(unit(density), "rain density must lie in [0,1]");
    require(streak_length >= 1, "streak_length must be >= 1");
    require(unit(threshold), "rain threshold must lie in [0,1]");
    require(std::isfinite(angle_deg), "rain angle must be finite");
    require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise_sigma must be finite and >= 0");
}

void MaskConfig::validate() const {
    require(unit(gamma), "gamma must lie in [0,1]");
    require(unit(mask_value), "mask_value must lie in [0,1]");
}

void FogConfig::validate() const {
    require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be finite and >= 0");
    require(unit(atmos_light), "atmospheric light must lie in [0,1]");
    if (fog_scale) require(*fog_scale > 0.0 && std::isfinite(*fog_scale), "fog_scale must be > 0");
}

void RcflaneConfig::validate() const {
    rain.validate();
    require(beta >= 0.0 && std::isfinite(beta), "beta must be finite and >= 0");
    mask.validate();
    fog.validate();
}

RcflaneConfig RcflaneConfig::identity() {
    RcflaneConfig cfg;
    cfg.rain.density = 0.0;
    cfg.mask.gamma = 1.0;
    cfg.fog.lambda = 0.0;
    return cfg;
}

ImageBuffer gen_rain_layer(const RainLayerConfig& cfg, int width, int height) {
    if (width < 1 || height < 1) throw InvalidArgument("rain layer needs a non-empty image size");
    cfg.validate();
    ImageBuffer layer(width, height, 1);
    const std::size_t n = layer.pixel_count();
    const auto seeds = static_cast<std::size_t>(std::llround(cfg.density * static_cast<double>(n)));
    if (seeds == 0) return layer;

    Rng rng(cfg.seed);
    std::vector<double> noise(n);
    for (double& v : noise) v = cfg.noise_sigma * rng.normal();

    // Top `seeds` noise values, ties broken by pixel index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto brighter = [&](std::size_t a, std::size_t b) {
        return noise[a] != noise[b] ? noise[a] > noise[b] : a < b;
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(seeds - 1), order.end(), brighter);
    order.resize(seeds);
    std::sort(order.begin(), order.end());

    int half = 0;
    const std::vector<double> kernel = line_kernel(cfg.streak_length, cfg.angle_deg, half);
    const int side = 2 * half + 1;
    auto out = layer.data();
    for (std::size_t idx : order) {
        const double v = std::clamp(noise[idx], 0.0, 1.0);
        if (v == 0.0) continue;
        const int r0 = static_cast<int>(idx / width);
        const int c0 = static_cast<int>(idx % width);
        for (int dr = -half; dr <= half; ++dr) {
            const int r = r0 + dr;
            if (r < 0 || r >= height) continue;
            for (int dc = -half; dc <= half; ++dc) {
                const int c = c0 + dc;
                if (c < 0 || c >= width) continue;
                const double w = kernel[static_cast<std::size_t>(dr + half) * side + (dc + half)];
                if (w != 0.0) out[static_cast<std::size_t>(r) * width + c] += v * w;
            }
        }
    }

    const double peak = *std::max_element(out.begin(), out.end());
    if (peak > 0.0) {
        for (double& v : out) {
            v /= peak;
            if (v < cfg.threshold) v = 0.0;
        }
    }
    return layer;
}

ImageBuffer compute_alpha(const ImageBuffer& rain) {
    if (rain.channels() != 1) throw InvalidArgument("rain layer must be single channel");
    ImageBuffer alpha(rain.width(), rain.height(), 1);
    auto src = rain.data();
    auto dst = alpha.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 1.0 - src[i];
    return alpha;
}

ImageBuffer compose_rain(const ImageBuffer& orig, const ImageBuffer& rain, double beta) {
    if (!orig.same_dims(rain)) throw DataError("compose_rain: rain layer and image dimensions differ");
    if (rain.channels() != 1) throw InvalidArgument("rain layer must be single channel");
    const ImageBuffer alpha = compute_alpha(rain);
    ImageBuffer out(orig.width(), orig.height(), orig.channels());
    const int ch = orig.channels();
    auto o = orig.data();
    auto a = alpha.data();
    auto r = rain.data();
    auto dst = out.data();
    for (std::size_t p = 0; p < orig.pixel_count(); ++p) {
        for (int c = 0; c < ch; ++c) {
            const std::size_t i = p * ch + c;
            dst[i] = std::clamp(a[p] * o[i] + beta * r[p], 0.0, 1.0);
        }
    }
    return out;
}

ImageBuffer apply_mask(const ImageBuffer& img, const MaskConfig& cfg) {
    cfg.validate();
    ImageBuffer out = img;
    const double keep = cfg.gamma;
    const double add = (1.0 - cfg.gamma) * cfg.mask_value;
    for (double& v : out.data()) v = keep * v + add;
    return out;
}

PixelCoord fog_center(int width, int height, const FogConfig& fog) {
    if (fog.center) {
        const PixelCoord c = *fog.center;
        if (c.row < 0 || c.row >= height || c.col < 0 || c.col >= width) {
            throw InvalidArgument("fog center lies outside the image");
        }
        return c;
    }
    return PixelCoord{(height - 1) / 2, (width - 1) / 2};
}

double default_fog_scale(int width, int height, PixelCoord center) {
    const double dr = std::max(center.row, height - 1 - center.row);
    const double dc = std::max(center.col, width - 1 - center.col);
    const double s = std::hypot(dr, dc);
    return s > 0.0 ? s : 1.0;
}

ScalarField distance_field(int width, int height, const FogConfig& fog) {
    if (width < 1 || height < 1) throw InvalidArgument("distance field needs a non-empty image size");
    fog.validate();
    const PixelCoord center = fog_center(width, height, fog);
    const double scale = fog.fog_scale.value_or(default_fog_scale(width, height, center));
    ScalarField d(width, height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double dist = std::hypot(static_cast<double>(r - center.row), static_cast<double>(c - center.col));
            d.at(r, c) = std::max(0.0, scale - dist);
        }
    }
    return d;
}

ScalarField transmission(const ScalarField& dfield, double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
    ScalarField td(dfield.width, dfield.height);
    for (std::size_t i = 0; i < dfield.values.size(); ++i) {
        if (dfield.values[i] < 0.0) throw InvalidArgument("distance field must be non-negative");
        td.values[i] = std::exp(-lambda * dfield.values[i]);
    }
    return td;
}

ImageBuffer apply_fog(const ImageBuffer& img, const ScalarField& td, double atmos_light) {
    if (img.width() != td.width || img.height() != td.height) {
        throw DataError("apply_fog: transmission map and image dimensions differ");
    }
    ImageBuffer out(img.width(), img.height(), img.channels());
    const int ch = img.channels();
    auto src = img.data();
    auto dst = out.data();
    parallel_for(img.height(), [&](int r0, int r1) {
        for (std::size_t p = static_cast<std::size_t>(r0) * img.width(); p < static_cast<std::size_t>(r1) * img.width();
             ++p) {
            const double t = td.values[p];
            for (int c = 0; c < ch; ++c) {
                const std::size_t i = p * ch + c;
                dst[i] = src[i] * t + atmos_light * (1.0 - t);
            }
        }
    });
    return out;
}

SynthResult synthesize(const ImageBuffer& orig, const RcflaneConfig& cfg) {
    if (orig.empty()) throw InvalidArgument("synthesize: empty input image");
    cfg.validate();
    SynthResult res;
    res.rain_layer = gen_rain_layer(cfg.rain, orig.width(), orig.height());
    res.rain_composed = compose_rain(orig, res.rain_layer, cfg.beta);
    res.masked = apply_mask(res.rain_composed, cfg.mask);
    res.transmission = transmission(distance_field(orig.width(), orig.height(), cfg.fog), cfg.fog.lambda);
    res.rainy = apply_fog(res.masked, res.transmission, cfg.fog.atmos_light);
    return res;
}

}  // namespace rainlane
