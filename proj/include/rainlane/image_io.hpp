#pragma once

#include <filesystem>

#include "rainlane/image.hpp"

namespace rainlane {

/// Reads an 8-bit grayscale or RGB PNG, or a binary PGM/PPM (P5/P6, maxval
/// 255). Intensities are mapped v/255.
ImageBuffer load_image(const std::filesystem::path& path);

/// Quantizes with round-half-up after clamping to [0,255]. Writes PPM/PGM when
/// the extension is .ppm/.pgm, PNG otherwise.
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

/// The byte that save_image writes for intensity `v`.
unsigned char quantize(double v);

}  // namespace rainlane
