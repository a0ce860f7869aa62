#pragma once

// Procedural clear road scenes used as training/evaluation fixtures.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rainlane/image.hpp"
#include "rainlane/random.hpp"

namespace rainlane::testing {

/// Sky gradient, a perspective road with lane markings, roadside blocks and
/// mild texture. Deterministic in `seed`.
inline ImageBuffer road_scene(std::uint64_t seed, int width, int height, double grain_amp = 0.03) {
    Rng rng(seed);
    ImageBuffer img(width, height, 3);
    const double horizon = height * rng.uniform(0.35, 0.5);
    const double vx = width * rng.uniform(0.4, 0.6);
    const double sky[3] = {rng.uniform(0.5, 0.7), rng.uniform(0.6, 0.8), rng.uniform(0.8, 0.95)};
    const double grass[3] = {rng.uniform(0.2, 0.35), rng.uniform(0.4, 0.55), rng.uniform(0.15, 0.25)};
    const double road = rng.uniform(0.3, 0.45);

    struct Block {
        double x0, x1, y0, y1, c[3];
    };
    Block blocks[6];
    for (Block& b : blocks) {
        const double cx = rng.uniform(0.0, width), w = rng.uniform(0.08, 0.25) * width;
        const double bottom = horizon + rng.uniform(0.0, 0.25) * height, h = rng.uniform(0.1, 0.35) * height;
        b = {cx - w / 2, cx + w / 2, bottom - h, bottom,
             {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)}};
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double px[3];
            if (y < horizon) {
                const double t = y / horizon;
                for (int c = 0; c < 3; ++c) px[c] = sky[c] * (1.0 - 0.3 * t) + 0.25 * t;
            } else {
                const double depth = (y - horizon) / (height - horizon);  // 0 at horizon, 1 at bottom
                const double half = 0.05 * width + depth * 0.55 * width;
                const double u = (x - vx) / half;  // -1..1 across the road
                if (std::abs(u) <= 1.0) {
                    const bool edge = std::abs(std::abs(u) - 0.92) < 0.03;
                    const bool center = std::abs(u) < 0.025 && std::fmod(depth * 12.0, 1.0) < 0.5;
                    const double v = (edge || center) ? 0.92 : road;
                    for (double& c : px) c = v;
                } else {
                    for (int c = 0; c < 3; ++c) px[c] = grass[c];
                }
            }
            for (const Block& b : blocks) {
                if (x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1) {
                    const bool window = (static_cast<int>(x / 4) + static_cast<int>(y / 5)) % 3 == 0;
                    for (int c = 0; c < 3; ++c) px[c] = window ? b.c[c] * 0.5 : b.c[c];
                }
            }
            const double grain = grain_amp * (rng.uniform() - 0.5);
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = std::clamp(px[c] + grain, 0.0, 1.0);
        }
    }
    return img;
}

}  // namespace rainlane::testing
