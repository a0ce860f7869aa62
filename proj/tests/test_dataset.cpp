#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "rainlane/dataset.hpp"
#include "rainlane/error.hpp"
#include "rainlane/image_io.hpp"
#include "support/scenes.hpp"
#include "support/tempdir.hpp"

using namespace rainlane;
namespace fs = std::filesystem;

namespace {

void write_sources(const fs::path& dir, int count) {
    fs::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        save_image(rainlane::testing::road_scene(300 + i, 40, 24), dir / ("frame_" + std::to_string(i) + ".png"));
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("split arithmetic") {
    CHECK(train_count(10, 0.8) == 8);
    CHECK(train_count(820, 715.0 / 820.0) == 715);
    CHECK(train_count(820, 0.872) == 715);
    CHECK(train_count(1, 0.5) <= 1);
}

TEST_CASE("image seed depends on the file name only") {
    CHECK(image_seed(5, "a.png") == image_seed(5, "a.png"));
    CHECK(image_seed(5, "a.png") != image_seed(5, "b.png"));
    CHECK(image_seed(5, "a.png") != image_seed(6, "a.png"));
}

TEST_CASE("build_dataset") {
    rainlane::testing::TempDir tmp;
    write_sources(tmp / "src", 10);
    BuildOptions opts;
    opts.src_dir = tmp / "src";
    opts.out_dir = tmp / "out1";
    opts.split_ratio = 0.8;
    opts.seed = 17;
    const DatasetManifest m = build_dataset(opts);

    SUBCASE("split counts, disjointness and coverage") {
        REQUIRE(m.entries.size() == 10);
        std::set<std::string> train, test;
        for (const ManifestEntry& e : m.entries) (e.split == "train" ? train : test).insert(e.clean_path);
        CHECK(train.size() == 8);
        CHECK(test.size() == 2);
        for (const std::string& p : test) CHECK(train.count(p) == 0);
        CHECK(load_pairs(opts.out_dir / "manifest.json", Split::Test).size() == 2);
        CHECK(load_pairs(opts.out_dir / "manifest.json", Split::Train).size() == 8);
    }
    SUBCASE("pairs match dimensions and rain changes every image") {
        for (const ImagePair& p : load_pairs(opts.out_dir / "manifest.json", Split::All)) {
            CHECK(p.clean.same_shape(p.rainy));
            CHECK_FALSE(p.clean == p.rainy);
        }
    }
    SUBCASE("rebuild is byte-identical") {
        opts.out_dir = tmp / "out2";
        const DatasetManifest again = build_dataset(opts);
        CHECK(to_json(again) == to_json(m));
        CHECK(slurp(tmp / "out1" / "manifest.json") == slurp(tmp / "out2" / "manifest.json"));
        for (const ManifestEntry& e : m.entries) {
            CHECK(slurp(tmp / "out1" / e.rainy_path) == slurp(tmp / "out2" / e.rainy_path));
        }
    }
    SUBCASE("manifest json round trip") {
        const DatasetManifest back = load_manifest(opts.out_dir / "manifest.json");
        CHECK(to_json(back) == to_json(m));
        CHECK(back.seed == 17);
    }
    SUBCASE("tampered manifest names the broken entry") {
        DatasetManifest bad = m;
        bad.entries[3].rainy_path = "rainy/does_not_exist.png";
        save_manifest(bad, opts.out_dir / "manifest.json");
        try {
            load_pairs(opts.out_dir / "manifest.json", Split::All);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("manifest entry 3") != std::string::npos);
        }
    }
    SUBCASE("identity config leaves images untouched") {
        opts.out_dir = tmp / "ident";
        opts.config = RcflaneConfig::identity();
        build_dataset(opts);
        for (const ImagePair& p : load_pairs(opts.out_dir / "manifest.json", Split::All)) CHECK(p.clean == p.rainy);
    }
}

TEST_CASE("build_dataset errors") {
    rainlane::testing::TempDir tmp;
    fs::create_directories(tmp / "empty");
    BuildOptions opts;
    opts.src_dir = tmp / "empty";
    opts.out_dir = tmp / "out";
    CHECK_THROWS_AS(build_dataset(opts), DataError);
    write_sources(tmp / "src", 2);
    opts.src_dir = tmp / "src";
    opts.split_ratio = 1.0;
    CHECK_THROWS_AS(build_dataset(opts), InvalidArgument);
}

TEST_CASE("manifest validation") {
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json{{"version", 2}}), DataError);
    CHECK(parse_split("train") == Split::Train);
    CHECK(parse_split("test") == Split::Test);
    CHECK(parse_split("all") == Split::All);
    CHECK_THROWS_AS(parse_split("validation"), InvalidArgument);
}
