#pragma once

// Checkpoint layout, all integers and reals little-endian:
//
//   char[8]  magic "RLKPNCK\0"
//   u32      format version (1)
//   u32      layer count (1 or 2)
//   per layer:
//     u32 in_channels, u32 conv_size, u32 hidden count, u32 hidden[count],
//     u32 ksize, u32 levels, u64 param count, f32 params[count]
//
// Nothing may follow the last layer.

#include <filesystem>
#include <vector>

#include "rainlane/kpn.hpp"

namespace rainlane {

inline constexpr char kCheckpointMagic[8] = {'R', 'L', 'K', 'P', 'N', 'C', 'K', '\0'};
inline constexpr unsigned kCheckpointVersion = 1;

void save_checkpoint(const std::vector<KpnModel>& layers, const std::filesystem::path& path);
void save_checkpoint(const DlkpnModel& model, const std::filesystem::path& path);

/// Throws DataError on a missing, truncated, or inconsistent file.
std::vector<KpnModel> load_layers(const std::filesystem::path& path);

/// Requires exactly two layers.
DlkpnModel load_checkpoint(const std::filesystem::path& path);

}  // namespace rainlane
