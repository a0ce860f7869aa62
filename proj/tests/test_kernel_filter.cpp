#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "rainlane/error.hpp"
#include "rainlane/kernel_filter.hpp"
#include "rainlane/parallel.hpp"
#include "rainlane/random.hpp"

using namespace rainlane;

namespace {

ImageBuffer random_image(Rng& rng, int w, int h, int c, double lo = 0.0, double hi = 1.0) {
    ImageBuffer img(w, h, c);
    for (double& v : img.data()) v = rng.uniform(lo, hi);
    return img;
}

// Softmax-like normalized field from random logits.
KernelField random_field(Rng& rng, int w, int h, int levels, int k, bool normalize) {
    KernelField f(w, h, levels, k);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            auto taps = f.taps_at(r, c);
            double sum = 0.0;
            for (float& t : taps) {
                t = normalize ? static_cast<float>(rng.uniform(0.01, 1.0)) : static_cast<float>(rng.uniform(-0.3, 0.6));
                sum += t;
            }
            if (normalize) {
                for (float& t : taps) t = static_cast<float>(t / sum);
            }
        }
    }
    f.set_normalized(normalize);
    return f;
}

double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace

TEST_CASE("dilation scheme") {
    CHECK(DilationScheme::hierarchical(4).strides == std::vector<int>{1, 2, 4, 8});
    CHECK_NOTHROW((DilationScheme{{1, 3}}.validate()));
    CHECK_THROWS_AS((DilationScheme{{2, 2}}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DilationScheme{{0, 1}}.validate()), InvalidArgument);
    CHECK_THROWS_AS(DilationScheme{{}}.validate(), InvalidArgument);
}

TEST_CASE("identity field") {
    const KernelField f = identity_field(7, 5, 5, 4);
    CHECK(f.normalized());
    CHECK(f.max_sum_deviation() == 0.0);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 7; ++c) {
            int nonzero = 0;
            for (float t : f.taps_at(r, c)) nonzero += t != 0.0f;
            CHECK(nonzero == 1);
            CHECK(f.taps_at(r, c).size() == 100);
            CHECK(f.at(r, c, 0, 2, 2) == 1.0f);
        }
    }
    CHECK_THROWS_AS(identity_field(4, 4, 4, 1), InvalidArgument);

    Rng rng(1);
    const ImageBuffer img = random_image(rng, 20, 13, 3);
    CHECK(apply_kernel_field(img, identity_field(20, 13, 3, 2), DilationScheme::hierarchical(2)) == img);
    CHECK(apply_kernel_field_naive(img, identity_field(20, 13, 3, 2), DilationScheme::hierarchical(2)) == img);
}

TEST_CASE("constant images survive normalized fields exactly up to rounding, borders included") {
    Rng rng(2);
    for (int k : {1, 3, 5}) {
        const ImageBuffer img(19, 17, 3, 0.37);
        const KernelField f = random_field(rng, 19, 17, 4, k, true);
        const DilationScheme s = DilationScheme::hierarchical(4);
        for (const ImageBuffer& out : {apply_kernel_field(img, f, s), apply_kernel_field_naive(img, f, s)}) {
            for (double v : out.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-5));
        }
    }
}

TEST_CASE("optimized filtering matches the naive oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 24; ++trial) {
        const int k = std::array{1, 3, 5}[trial % 3];
        const int levels = trial % 2 ? 4 : 1;
        const int w = 16 + static_cast<int>(rng.below(49));
        const int h = 16 + static_cast<int>(rng.below(49));
        const int c = trial % 4 == 0 ? 1 : 3;
        const ImageBuffer img = random_image(rng, w, h, c);
        const KernelField f = random_field(rng, w, h, levels, k, trial % 5 != 0);
        const DilationScheme s = DilationScheme::hierarchical(levels);
        CHECK(max_abs_diff(apply_kernel_field(img, f, s), apply_kernel_field_naive(img, f, s)) <= 1e-6);
    }
}

TEST_CASE("row-parallel output is bit-identical to single-threaded output") {
    Rng rng(4);
    const ImageBuffer img = random_image(rng, 48, 40, 3);
    const KernelField f = random_field(rng, 48, 40, 4, 5, true);
    const DilationScheme s = DilationScheme::hierarchical(4);
    const int saved = thread_count();
    set_thread_count(1);
    const ImageBuffer one = apply_kernel_field(img, f, s);
    set_thread_count(4);
    const ImageBuffer four = apply_kernel_field(img, f, s);
    set_thread_count(saved);
    CHECK(one == four);
}

TEST_CASE("linear in the image while results stay in range") {
    Rng rng(5);
    const ImageBuffer a = random_image(rng, 24, 24, 3, 0.0, 0.5);
    const ImageBuffer b = random_image(rng, 24, 24, 3, 0.0, 0.5);
    const KernelField f = random_field(rng, 24, 24, 2, 3, true);
    const DilationScheme s = DilationScheme::hierarchical(2);
    ImageBuffer mix(24, 24, 3);
    for (std::size_t i = 0; i < mix.size(); ++i) mix.data()[i] = 0.6 * a.data()[i] + 1.2 * b.data()[i];
    const ImageBuffer fa = apply_kernel_field(a, f, s), fb = apply_kernel_field(b, f, s);
    const ImageBuffer fm = apply_kernel_field(mix, f, s);
    for (std::size_t i = 0; i < mix.size(); ++i) {
        CHECK(fm.data()[i] == doctest::Approx(0.6 * fa.data()[i] + 1.2 * fb.data()[i]).epsilon(1e-9));
    }
}

TEST_CASE("single pixel and zero field") {
    const ImageBuffer px(1, 1, 1, 0.8);
    KernelField f(1, 1, 1, 1);
    const DilationScheme s = DilationScheme::hierarchical(1);
    for (float w : {0.5f, 1.0f, 2.0f, -1.0f}) {
        f.at(0, 0, 0, 0, 0) = w;
        const double expect = std::clamp(static_cast<double>(w) * 0.8, 0.0, 1.0);
        CHECK(apply_kernel_field_naive(px, f, s).at(0, 0) == doctest::Approx(expect).epsilon(1e-7));
        CHECK(apply_kernel_field(px, f, s).at(0, 0) == doctest::Approx(expect).epsilon(1e-7));
    }

    Rng rng(6);
    const ImageBuffer img = random_image(rng, 12, 9, 3);
    const KernelField zero(12, 9, 2, 3);
    const ImageBuffer fast = apply_kernel_field(img, zero, DilationScheme::hierarchical(2));
    const ImageBuffer naive = apply_kernel_field_naive(img, zero, DilationScheme::hierarchical(2));
    for (double v : fast.data()) CHECK(v == 0.0);
    for (double v : naive.data()) CHECK(v == 0.0);
}

TEST_CASE("precondition errors") {
    const ImageBuffer img(8, 8, 3, 0.5);
    CHECK_THROWS_AS(apply_kernel_field(img, identity_field(8, 7, 3, 1), DilationScheme::hierarchical(1)), DataError);
    CHECK_THROWS_AS(apply_kernel_field(img, identity_field(8, 8, 3, 2), DilationScheme::hierarchical(1)), DataError);
    // reach 8 * 2 = 16 >= 8
    CHECK_THROWS(apply_kernel_field(img, identity_field(8, 8, 5, 4), DilationScheme::hierarchical(4)));
    CHECK_THROWS(apply_kernel_field_naive(img, identity_field(8, 8, 5, 4), DilationScheme::hierarchical(4)));
}
