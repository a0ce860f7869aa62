#include "rainlane/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "rainlane/config_json.hpp"
#include "rainlane/error.hpp"
#include "rainlane/image_io.hpp"
#include "rainlane/parallel.hpp"
#include "rainlane/random.hpp"

namespace rainlane {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_image(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

json to_json(const DatasetManifest& m) {
    json entries = json::array();
    for (const ManifestEntry& e : m.entries) {
        json je = {{"clean_path", e.clean_path}, {"rainy_path", e.rainy_path}, {"split", e.split}};
        je["gt_depth_path"] = e.gt_depth_path ? json(*e.gt_depth_path) : json(nullptr);
        entries.push_back(std::move(je));
    }
    return json{{"format_version", m.version},
                {"seed", m.seed},
                {"split_ratio", m.split_ratio},
                {"rcflane_config", to_json(m.rcflane_config)},
                {"entries", std::move(entries)}};
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    try {
        m.version = j.at("format_version").get<int>();
        if (m.version != kManifestVersion) {
            throw DataError("unsupported manifest format version " + std::to_string(m.version) + ", expected " +
                            std::to_string(kManifestVersion));
        }
        m.seed = j.at("seed").get<std::uint64_t>();
        m.split_ratio = j.at("split_ratio").get<double>();
        m.rcflane_config = rcflane_from_json(j.at("rcflane_config"));
        std::set<std::string> seen;
        for (const json& je : j.at("entries")) {
            ManifestEntry e;
            e.clean_path = je.at("clean_path").get<std::string>();
            e.rainy_path = je.at("rainy_path").get<std::string>();
            e.split = je.at("split").get<std::string>();
            if (e.split != "train" && e.split != "test") throw DataError("manifest entry has invalid split '" + e.split + "'");
            if (je.contains("gt_depth_path") && !je.at("gt_depth_path").is_null()) {
                e.gt_depth_path = je.at("gt_depth_path").get<std::string>();
            }
            if (!seen.insert(e.rainy_path).second) throw DataError("manifest lists '" + e.rainy_path + "' twice");
            m.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
    out << to_json(manifest).dump(2) << "\n";
    if (!out) throw DataError("write failed for manifest '" + path.string() + "'");
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("cannot parse manifest '" + path.string() + "': " + e.what());
    }
    return manifest_from_json(j);
}

std::uint64_t image_seed(std::uint64_t seed, const std::string& filename) { return seed ^ fnv1a64(filename); }

std::size_t train_count(std::size_t count, double split_ratio) {
    return static_cast<std::size_t>(std::llround(split_ratio * static_cast<double>(count)));
}

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("source directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

DatasetManifest build_dataset(const BuildOptions& opts) {
    if (!(opts.split_ratio > 0.0 && opts.split_ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0,1)");
    opts.config.validate();
    const std::vector<fs::path> files = list_images(opts.src_dir);
    if (files.empty()) throw DataError("source directory '" + opts.src_dir.string() + "' contains no images");

    std::set<std::string> stems;
    for (const fs::path& f : files) {
        if (!stems.insert(f.stem().string()).second) {
            throw DataError("two source images share the name '" + f.stem().string() + "'");
        }
    }

    std::error_code ec;
    fs::create_directories(opts.out_dir / "rainy", ec);
    if (ec) throw DataError("cannot create output directory '" + opts.out_dir.string() + "': " + ec.message());

    DatasetManifest manifest;
    manifest.seed = opts.seed;
    manifest.split_ratio = opts.split_ratio;
    manifest.rcflane_config = opts.config;
    manifest.entries.resize(files.size());

    std::vector<std::string> errors(files.size());
    parallel_for(static_cast<int>(files.size()), [&](int b, int e) {
        for (int i = b; i < e; ++i) {
            try {
                const fs::path& src = files[i];
                const ImageBuffer clean = load_image(src);
                RcflaneConfig cfg = opts.config;
                cfg.rain.seed = image_seed(opts.seed, src.filename().string());
                const fs::path rel = fs::path("rainy") / (src.stem().string() + ".png");
                save_image(synthesize(clean, cfg).rainy, opts.out_dir / rel);
                ManifestEntry& entry = manifest.entries[i];
                entry.clean_path = fs::absolute(src).lexically_normal().string();
                entry.rainy_path = rel.generic_string();
                if (opts.depth_dir) {
                    const fs::path depth = *opts.depth_dir / (src.stem().string() + ".png");
                    if (fs::exists(depth)) entry.gt_depth_path = fs::absolute(depth).lexically_normal().string();
                }
            } catch (const std::exception& ex) {
                errors[i] = ex.what();
            }
        }
    });
    for (const std::string& err : errors) {
        if (!err.empty()) throw DataError(err);
    }

    std::vector<std::size_t> order(files.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(opts.seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const std::size_t n_train = train_count(files.size(), opts.split_ratio);
    for (std::size_t k = 0; k < order.size(); ++k) manifest.entries[order[k]].split = k < n_train ? "train" : "test";

    save_manifest(manifest, opts.out_dir / "manifest.json");
    return manifest;
}

Split parse_split(const std::string& text) {
    if (text == "train") return Split::Train;
    if (text == "test") return Split::Test;
    if (text == "all") return Split::All;
    throw InvalidArgument("split must be train, test or all, got '" + text + "'");
}

std::vector<ImagePair> load_pairs(const fs::path& manifest_path, Split split) {
    const DatasetManifest m = load_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();
    std::vector<ImagePair> pairs;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const ManifestEntry& e = m.entries[i];
        if (split == Split::Train && e.split != "train") continue;
        if (split == Split::Test && e.split != "test") continue;
        const std::string tag = "manifest entry " + std::to_string(i);
        ImagePair pair;
        pair.name = fs::path(e.rainy_path).stem().string();
        try {
            pair.clean = load_image(resolve(base, e.clean_path));
            pair.rainy = load_image(resolve(base, e.rainy_path));
        } catch (const DataError& ex) {
            throw DataError(tag + ": " + ex.what());
        }
        if (!pair.clean.same_shape(pair.rainy)) {
            throw DataError(tag + ": clean and rainy images have different dimensions");
        }
        if (e.gt_depth_path) pair.gt_depth_path = resolve(base, *e.gt_depth_path);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace rainlane
