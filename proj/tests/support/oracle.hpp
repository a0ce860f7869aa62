#pragma once

// Test-only reference implementations. They share no code with the library's
// optimized paths: plain loops over the flat parameter vector and the image.

#include <algorithm>
#include <cmath>
#include <vector>

#include "rainlane/image.hpp"
#include "rainlane/kpn.hpp"

namespace rainlane::testing {

/// Direct loop convolution, stride 1, clamp-to-edge. in/out are [c][y][x].
inline std::vector<double> naive_conv(const std::vector<double>& in, int cin, int h, int w, const double* weights,
                                      const double* bias, int cout, int k) {
    std::vector<double> out(static_cast<std::size_t>(cout) * h * w);
    const int half = k / 2;
    for (int co = 0; co < cout; ++co) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = bias[co];
                for (int ci = 0; ci < cin; ++ci) {
                    for (int ky = 0; ky < k; ++ky) {
                        for (int kx = 0; kx < k; ++kx) {
                            const int yy = std::clamp(y + ky - half, 0, h - 1);
                            const int xx = std::clamp(x + kx - half, 0, w - 1);
                            acc += weights[((static_cast<std::size_t>(co) * cin + ci) * k + ky) * k + kx] *
                                   in[(static_cast<std::size_t>(ci) * h + yy) * w + xx];
                        }
                    }
                }
                out[(static_cast<std::size_t>(co) * h + y) * w + x] = acc;
            }
        }
    }
    return out;
}

/// Restoration computed from `params` (which may differ from model.params)
/// entirely in double precision, clamped to [0,1].
inline ImageBuffer naive_kpn_restore(const KpnArch& arch, const std::vector<double>& params, const ImageBuffer& img) {
    const int h = img.height(), w = img.width(), C = img.channels();
    std::vector<double> x(static_cast<std::size_t>(C) * h * w);
    for (int c = 0; c < C; ++c) {
        for (int y = 0; y < h; ++y) {
            for (int xx = 0; xx < w; ++xx) x[(static_cast<std::size_t>(c) * h + y) * w + xx] = img.at(y, xx, c);
        }
    }
    std::vector<double> act = x;
    std::size_t off = 0;
    for (int s = 0; s < arch.stages(); ++s) {
        const int cin = arch.stage_in(s), cout = arch.stage_out(s), k = arch.conv_size;
        const double* wts = params.data() + off;
        off += static_cast<std::size_t>(cout) * cin * k * k;
        const double* b = params.data() + off;
        off += cout;
        act = naive_conv(act, cin, h, w, wts, b, cout, k);
        if (s + 1 < arch.stages()) {
            for (double& v : act) v = std::tanh(v);
        }
    }
    const int taps = arch.head_channels(), K = arch.ksize, c0 = K / 2;
    ImageBuffer out(w, h, C);
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
            std::vector<double> z(taps);
            double peak = -INFINITY;
            for (int t = 0; t < taps; ++t) {
                z[t] = act[(static_cast<std::size_t>(t) * h + y) * w + xx];
                peak = std::max(peak, z[t]);
            }
            double sum = 0.0;
            for (double& v : z) sum += (v = std::exp(v - peak));
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int r = 0; r < arch.levels; ++r) {
                    const int s = 1 << r;
                    for (int i = 0; i < K; ++i) {
                        for (int j = 0; j < K; ++j) {
                            const int yy = std::clamp(y + s * (i - c0), 0, h - 1);
                            const int xs = std::clamp(xx + s * (j - c0), 0, w - 1);
                            acc += z[(r * K + i) * K + j] / sum * img.at(yy, xs, c);
                        }
                    }
                }
                out.at(y, xx, c) = std::clamp(acc, 0.0, 1.0);
            }
        }
    }
    return out;
}

inline double naive_l1(const ImageBuffer& a, const ImageBuffer& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.data()[i] - b.data()[i]);
    return s / static_cast<double>(a.size());
}

inline double naive_l2(const ImageBuffer& a, const ImageBuffer& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace rainlane::testing
