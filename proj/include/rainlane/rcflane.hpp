#pragma once

// Rainy road image synthesis: rain streak layer, global darkening mask and a
// center-weighted fog veil, applied in that order.
//
//   O1 = alpha * O + beta * R          alpha = 1 - R, clamped to [0,1]
//   O2 = gamma * O1 + (1 - gamma) * D  D constant
//   Ô  = O2 * td + A * (1 - td)        td = exp(-lambda * d)
//   d  = max(0, S - |x - x_mid|)

#include <cstdint>
#include <optional>

#include "rainlane/image.hpp"

namespace rainlane {

struct RainLayerConfig {
    double density = 0.02;     // fraction of pixels seeded as streak origins
    int streak_length = 15;    // pixels
    double angle_deg = 75.0;   // counter-clockwise from the image x axis, y pointing up
    double noise_sigma = 0.5;  // std-dev of the seeding noise field
    double threshold = 0.05;   // streak values below this (after max-normalization) are dropped
    std::uint64_t seed = 0;

    void validate() const;
};

struct MaskConfig {
    double gamma = 0.2;
    double mask_value = 0.0;

    void validate() const;
};

struct FogConfig {
    double lambda = 0.025;
    double atmos_light = 0.5;
    std::optional<double> fog_scale;   // absent: largest distance from the center to a corner
    std::optional<PixelCoord> center;  // absent: ((height-1)/2, (width-1)/2)

    void validate() const;
};

struct RcflaneConfig {
    RainLayerConfig rain;
    double beta = 1.0;
    MaskConfig mask;
    FogConfig fog;

    void validate() const;

    /// density 0, gamma 1, lambda 0: every stage is the identity.
    static RcflaneConfig identity();
};

struct SynthResult {
    ImageBuffer rainy;         // Ô
    ImageBuffer rain_composed; // O1
    ImageBuffer masked;        // O2
    ImageBuffer rain_layer;    // R
    ScalarField transmission;  // td
};

ImageBuffer gen_rain_layer(const RainLayerConfig& cfg, int width, int height);

/// Per-pixel retention weight 1 - R.
ImageBuffer compute_alpha(const ImageBuffer& rain);

ImageBuffer compose_rain(const ImageBuffer& orig, const ImageBuffer& rain, double beta);

ImageBuffer apply_mask(const ImageBuffer& img, const MaskConfig& cfg);

PixelCoord fog_center(int width, int height, const FogConfig& fog);
double default_fog_scale(int width, int height, PixelCoord center);

ScalarField distance_field(int width, int height, const FogConfig& fog);

ScalarField transmission(const ScalarField& dfield, double lambda);

ImageBuffer apply_fog(const ImageBuffer& img, const ScalarField& td, double atmos_light);

SynthResult synthesize(const ImageBuffer& orig, const RcflaneConfig& cfg);

}  // namespace rainlane
