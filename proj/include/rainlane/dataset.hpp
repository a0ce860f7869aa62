#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rainlane/image.hpp"
#include "rainlane/rcflane.hpp"

namespace rainlane {

inline constexpr int kManifestVersion = 1;

enum class Split { Train, Test, All };

struct ManifestEntry {
    std::string clean_path;  // relative paths resolve against the manifest's directory
    std::string rainy_path;
    std::optional<std::string> gt_depth_path;
    std::string split;  // "train" or "test"
};

struct DatasetManifest {
    int version = kManifestVersion;
    std::uint64_t seed = 0;
    double split_ratio = 0.0;
    RcflaneConfig rcflane_config;
    std::vector<ManifestEntry> entries;
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Rain seed used for the image called `filename`.
std::uint64_t image_seed(std::uint64_t seed, const std::string& filename);

/// Number of training images for `count` images at `split_ratio`.
std::size_t train_count(std::size_t count, double split_ratio);

struct BuildOptions {
    std::filesystem::path src_dir;
    std::filesystem::path out_dir;
    RcflaneConfig config;
    double split_ratio = 0.872;
    std::uint64_t seed = 0;
    /// When set, <depth_dir>/<stem>.png is recorded as ground truth depth if present.
    std::optional<std::filesystem::path> depth_dir;
};

/// Synthesizes <out_dir>/rainy/<stem>.png for every PNG/PPM/PGM in src_dir,
/// assigns splits by seeded shuffle and writes <out_dir>/manifest.json.
DatasetManifest build_dataset(const BuildOptions& opts);

/// Images under src_dir accepted by build_dataset, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

struct ImagePair {
    std::string name;
    ImageBuffer clean;
    ImageBuffer rainy;
    std::optional<std::filesystem::path> gt_depth_path;
};

std::vector<ImagePair> load_pairs(const std::filesystem::path& manifest_path, Split split);

Split parse_split(const std::string& text);

}  // namespace rainlane
