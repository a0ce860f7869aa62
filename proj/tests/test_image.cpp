#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "rainlane/error.hpp"
#include "rainlane/image.hpp"
#include "rainlane/image_io.hpp"
#include "rainlane/metrics.hpp"
#include "rainlane/random.hpp"
#include "support/tempdir.hpp"

using namespace rainlane;
using rainlane::testing::TempDir;

TEST_CASE("ImageBuffer validates its shape and contents") {
    CHECK_THROWS_AS(ImageBuffer(0, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(ImageBuffer(2, 2, 2), InvalidArgument);
    CHECK_THROWS_AS(ImageBuffer(2, 2, 1, std::vector<double>(3)), InvalidArgument);
    CHECK_THROWS_AS(ImageBuffer(1, 1, 1, std::vector<double>{NAN}), InvalidArgument);
    ImageBuffer img(3, 2, 3, 0.25);
    CHECK(img.size() == 18);
    CHECK(img.at(1, 2, 2) == 0.25);
}

TEST_CASE("quantization rounds half up and clamps") {
    CHECK(quantize(1.0) == 255);
    CHECK(quantize(0.5) == 128);
    CHECK(quantize(1.2) == 255);
    CHECK(quantize(-0.3) == 0);
    CHECK(quantize(0.0) == 0);
}

TEST_CASE("saturated PNGs load as ones and zeros") {
    TempDir dir;
    save_image(ImageBuffer(2, 2, 3, 1.0), dir / "white.png");
    save_image(ImageBuffer(2, 2, 1, 0.0), dir / "black.png");
    const ImageBuffer white = load_image(dir / "white.png");
    const ImageBuffer black = load_image(dir / "black.png");
    CHECK(white.channels() == 3);
    CHECK(black.channels() == 1);
    for (double v : white.data()) CHECK(v == 1.0);
    for (double v : black.data()) CHECK(v == 0.0);
}

TEST_CASE("load(save(img)) is the identity on byte-valued images") {
    TempDir dir;
    Rng rng(11);
    for (int channels : {1, 3}) {
        for (const char* ext : {".png", ".ppm"}) {
            if (channels == 1 && std::string(ext) == ".ppm") continue;
            std::vector<double> data(static_cast<std::size_t>(7) * 5 * channels);
            std::vector<unsigned char> bytes(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                bytes[i] = static_cast<unsigned char>(rng.below(256));
                data[i] = bytes[i] / 255.0;
            }
            const ImageBuffer img(7, 5, channels, data);
            const auto path = dir / (std::string("rt") + std::to_string(channels) + ext);
            save_image(img, path);
            const ImageBuffer back = load_image(path);
            REQUIRE(back.same_shape(img));
            for (std::size_t i = 0; i < bytes.size(); ++i) CHECK(quantize(back.data()[i]) == bytes[i]);
            CHECK(back == img);
        }
    }
}

TEST_CASE("load_image reports missing and undecodable files by path") {
    TempDir dir;
    const auto missing = dir / "nope.png";
    try {
        load_image(missing);
        FAIL("expected an exception");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("nope.png") != std::string::npos);
    }
    {
        std::ofstream(dir / "junk.png") << "definitely not a png";
    }
    CHECK_THROWS_AS(load_image(dir / "junk.png"), DataError);
    {
        std::ofstream(dir / "deep.ppm", std::ios::binary) << "P6\n1 1\n65535\n";
    }
    CHECK_THROWS_WITH_AS(load_image(dir / "deep.ppm"), doctest::Contains("bit depth"), DataError);
}

TEST_CASE("16-bit PNGs are rejected as images") {
    TempDir dir;
    save_depth_png(DepthMap(3, 2, 5.0), dir / "d16.png");
    CHECK_THROWS_WITH_AS(load_image(dir / "d16.png"), doctest::Contains("bit depth"), DataError);
}

TEST_CASE("to_gray uses Rec.601 luma") {
    CHECK(to_gray(ImageBuffer(1, 1, 3, 1.0)).at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(to_gray(ImageBuffer(1, 1, 3, std::vector<double>{1.0, 0.0, 0.0})).at(0, 0) == 0.299);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const double v = rng.uniform();
        const ImageBuffer g = to_gray(ImageBuffer(4, 3, 3, v));
        for (double x : g.data()) CHECK(x == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK_THROWS_AS(to_gray(ImageBuffer(2, 2, 1)), InvalidArgument);
}
