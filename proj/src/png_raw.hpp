#pragma once

// Thin libpng wrapper shared by the image and depth-map readers.

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rainlane::detail {

struct RawPng {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
    int bit_depth = 0;  // 8 or 16 after expansion of palette / low bit depths
    bool palette = false;
    // Samples in row-major interleaved order; 16-bit samples are big-endian
    // decoded into host order.
    std::vector<std::uint16_t> samples;
};

RawPng read_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, int width, int height, int channels, int bit_depth,
               const std::vector<std::uint16_t>& samples);

}  // namespace rainlane::detail
