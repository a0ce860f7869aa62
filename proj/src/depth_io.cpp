#include <algorithm>
#include <cmath>
#include <string>

#include "png_raw.hpp"
#include "rainlane/error.hpp"
#include "rainlane/metrics.hpp"

namespace rainlane {

DepthMap load_depth_png(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("depth file '" + path.string() + "' does not exist");
    const detail::RawPng raw = detail::read_png(path);
    if (raw.bit_depth != 16 || raw.channels != 1) {
        throw DataError("depth map '" + path.string() + "' must be a 16-bit single channel PNG");
    }
    DepthMap map(raw.width, raw.height);
    for (int r = 0; r < raw.height; ++r) {
        for (int c = 0; c < raw.width; ++c) {
            const std::uint16_t v = raw.samples[static_cast<std::size_t>(r) * raw.width + c];
            map.set(r, c, v / 256.0);
        }
    }
    return map;
}

void save_depth_png(const DepthMap& map, const std::filesystem::path& path) {
    std::vector<std::uint16_t> samples(map.depth.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!map.valid[i]) continue;
        const double raw = std::floor(map.depth[i] * 256.0 + 0.5);
        samples[i] = static_cast<std::uint16_t>(std::clamp(raw, 1.0, 65535.0));
    }
    detail::write_png(path, map.width, map.height, 1, 16, samples);
}

}  // namespace rainlane
