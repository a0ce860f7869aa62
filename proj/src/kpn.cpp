#include "rainlane/kpn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpn_internal.hpp"
#include "rainlane/error.hpp"
#include "rainlane/parallel.hpp"
#include "rainlane/random.hpp"

namespace rainlane {

using detail::RowMatrix;
using detail::Tensor;

namespace {

constexpr int kBandRows = 32;

std::size_t stage_params(const KpnArch& arch, int s) {
    return static_cast<std::size_t>(arch.stage_out(s)) * arch.stage_in(s) * arch.conv_size * arch.conv_size +
           static_cast<std::size_t>(arch.stage_out(s));
}

void check_input(const KpnModel& model, const ImageBuffer& img) {
    if (img.empty()) throw InvalidArgument("kpn: empty input image");
    if (img.channels() != model.arch.in_channels) {
        throw DataError("kpn: model expects " + std::to_string(model.arch.in_channels) + " channels, image has " +
                        std::to_string(img.channels()));
    }
    if (model.params.size() != model.arch.param_count()) {
        throw DataError("kpn: parameter count does not match the architecture");
    }
}

}  // namespace

std::size_t KpnArch::weight_offset(int s) const {
    std::size_t off = 0;
    for (int i = 0; i < s; ++i) off += stage_params(*this, i);
    return off;
}

std::size_t KpnArch::bias_offset(int s) const {
    return weight_offset(s) + static_cast<std::size_t>(stage_out(s)) * stage_in(s) * conv_size * conv_size;
}

std::size_t KpnArch::param_count() const { return weight_offset(stages()); }

void KpnArch::validate() const {
    if (in_channels != 1 && in_channels != 3) throw InvalidArgument("kpn input must have 1 or 3 channels");
    if (conv_size < 1 || conv_size % 2 == 0) throw InvalidArgument("kpn conv_size must be odd and >= 1");
    if (ksize < 1 || ksize % 2 == 0) throw InvalidArgument("kpn kernel size must be odd and >= 1");
    if (levels < 1 || levels > 8) throw InvalidArgument("kpn levels must lie in [1,8]");
    for (int w : hidden) {
        if (w < 1) throw InvalidArgument("kpn hidden widths must be positive");
    }
}

KpnModel KpnModel::initialize(const KpnArch& arch, std::uint64_t seed, const InitOptions& opts) {
    arch.validate();
    KpnModel model{arch, std::vector<double>(arch.param_count(), 0.0)};
    Rng rng(seed);
    const int k2 = arch.conv_size * arch.conv_size;
    for (int s = 0; s < arch.stages(); ++s) {
        const double fan_in = static_cast<double>(arch.stage_in(s)) * k2;
        const double fan_out = static_cast<double>(arch.stage_out(s)) * k2;
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        if (s + 1 == arch.stages()) bound *= opts.head_weight_scale;
        const std::size_t w0 = arch.weight_offset(s);
        for (std::size_t i = w0; i < arch.bias_offset(s); ++i) {
            model.params[i] = static_cast<float>(rng.uniform(-bound, bound));
        }
    }
    const int c = arch.ksize / 2;
    model.params[arch.bias_offset(arch.stages() - 1) + static_cast<std::size_t>(c) * arch.ksize + c] =
        static_cast<float>(opts.identity_logit);
    return model;
}

namespace detail {

Tensor run_stack(const KpnModel& model, const Tensor& input, StackCache* cache) {
    const KpnArch& arch = model.arch;
    if (cache) {
        cache->inputs.assign(arch.stages(), Tensor{});
        cache->cols.assign(arch.stages(), RowMatrix{});
    }
    RowMatrix scratch;
    Tensor x = input;
    for (int s = 0; s < arch.stages(); ++s) {
        RowMatrix& col = cache ? cache->cols[s] : scratch;
        Tensor y = conv_forward(x, model.params.data() + arch.weight_offset(s),
                                model.params.data() + arch.bias_offset(s), arch.stage_out(s), arch.conv_size, col);
        if (cache) cache->inputs[s] = std::move(x);
        if (s + 1 < arch.stages()) {
            for (double& v : y.values) v = std::tanh(v);
        }
        x = std::move(y);
    }
    return x;
}

void softmax_channels(Tensor& logits) {
    const std::size_t plane = logits.plane();
    for (std::size_t p = 0; p < plane; ++p) {
        double peak = -INFINITY;
        for (int t = 0; t < logits.channels; ++t) peak = std::max(peak, logits.values[plane * t + p]);
        double sum = 0.0;
        for (int t = 0; t < logits.channels; ++t) {
            double& v = logits.values[plane * t + p];
            v = std::exp(v - peak);
            sum += v;
        }
        for (int t = 0; t < logits.channels; ++t) logits.values[plane * t + p] /= sum;
    }
}

Tensor filter_planar(const Tensor& img, const Tensor& weights, const KpnArch& arch) {
    const int H = img.height, W = img.width, K = arch.ksize, c = K / 2;
    const DilationScheme scheme = arch.scheme();
    Tensor out(img.channels, H, W);
    std::vector<int> cols(W);
    for (int r = 0; r < arch.levels; ++r) {
        for (int i = 0; i < K; ++i) {
            for (int j = 0; j < K; ++j) {
                const int t = (r * K + i) * K + j;
                const int dy = scheme.strides[r] * (i - c), dx = scheme.strides[r] * (j - c);
                for (int x = 0; x < W; ++x) cols[x] = std::clamp(x + dx, 0, W - 1);
                const double* w = weights.channel(t);
                for (int ch = 0; ch < img.channels; ++ch) {
                    const double* src = img.channel(ch);
                    double* dst = out.channel(ch);
                    for (int y = 0; y < H; ++y) {
                        const double* srow = src + static_cast<std::size_t>(std::clamp(y + dy, 0, H - 1)) * W;
                        const double* wrow = w + static_cast<std::size_t>(y) * W;
                        double* drow = dst + static_cast<std::size_t>(y) * W;
                        for (int x = 0; x < W; ++x) drow[x] += wrow[x] * srow[cols[x]];
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace detail

KpnOutput kpn_forward(const KpnModel& model, const ImageBuffer& img) {
    check_input(model, img);
    const KpnArch& arch = model.arch;
    const int H = img.height(), W = img.width();
    KpnOutput out{KernelField(W, H, arch.levels, arch.ksize), {}};
    const int bands = (H + kBandRows - 1) / kBandRows;
    parallel_for(bands, [&](int b0, int b1) {
        for (int b = b0; b < b1; ++b) {
            const int r0 = b * kBandRows, r1 = std::min(H, r0 + kBandRows);
            const int e0 = std::max(0, r0 - arch.halo()), e1 = std::min(H, r1 + arch.halo());
            Tensor logits = detail::run_stack(model, detail::planar_rows(img, e0, e1 - e0), nullptr);
            detail::softmax_channels(logits);
            for (int y = r0; y < r1; ++y) {
                for (int x = 0; x < W; ++x) {
                    auto taps = out.field.taps_at(y, x);
                    const std::size_t p = static_cast<std::size_t>(y - e0) * W + x;
                    for (int t = 0; t < arch.head_channels(); ++t) {
                        taps[t] = static_cast<float>(logits.values[logits.plane() * t + p]);
                    }
                }
            }
        }
    });
    for (float w : out.field.weights()) {
        if (!std::isfinite(w)) throw NumericalError("kpn: non-finite kernel weight predicted");
    }
    out.field.set_normalized(true);
    out.restored = apply_kernel_field(img, out.field, arch.scheme());
    return out;
}

ImageBuffer kpn_restore(const KpnModel& model, const ImageBuffer& img) {
    return kpn_forward(model, img).restored;
}

DlkpnOutput dlkpn_infer(const DlkpnModel& model, const ImageBuffer& img) {
    DlkpnOutput out;
    out.mid = kpn_restore(model.layer1, img);
    out.final = kpn_restore(model.layer2, out.mid);
    return out;
}

double loss_l1(const ImageBuffer& pred, const ImageBuffer& target) {
    if (!pred.same_shape(target)) throw DataError("loss_l1: prediction and target shapes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred.data()[i] - target.data()[i]);
    return sum / static_cast<double>(pred.size());
}

double loss_l2(const ImageBuffer& pred, const ImageBuffer& target) {
    if (!pred.same_shape(target)) throw DataError("loss_l2: prediction and target shapes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data()[i] - target.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pred.size());
}

double loss_value(LossKind kind, const ImageBuffer& pred, const ImageBuffer& target) {
    return kind == LossKind::L1 ? loss_l1(pred, target) : loss_l2(pred, target);
}

std::string to_string(LossKind kind) { return kind == LossKind::L1 ? "l1" : "l2"; }

LossKind parse_loss(const std::string& text) {
    if (text == "l1" || text == "L1") return LossKind::L1;
    if (text == "l2" || text == "L2") return LossKind::L2;
    throw InvalidArgument("loss must be l1 or l2, got '" + text + "'");
}

LossGradient backward(const KpnModel& model, const ImageBuffer& img, const ImageBuffer& target, LossKind kind) {
    check_input(model, img);
    if (!img.same_shape(target)) throw DataError("backward: input and target shapes differ");
    const KpnArch& arch = model.arch;
    const int reach = (1 << (arch.levels - 1)) * (arch.ksize / 2);
    if (reach >= std::max(img.width(), img.height())) {
        throw InvalidArgument("backward: dilated kernel reach is not smaller than the image");
    }

    const Tensor input = detail::to_planar(img);
    const Tensor goal = detail::to_planar(target);
    detail::StackCache cache;
    Tensor weights = detail::run_stack(model, input, &cache);
    detail::softmax_channels(weights);
    const Tensor restored = detail::filter_planar(input, weights, arch);

    const std::size_t plane = input.plane();
    const double n = static_cast<double>(plane) * input.channels;
    LossGradient res;
    res.grad.assign(model.params.size(), 0.0);
    Tensor g(input.channels, input.height, input.width);
    for (std::size_t i = 0; i < restored.values.size(); ++i) {
        const double diff = std::clamp(restored.values[i], 0.0, 1.0) - goal.values[i];
        if (kind == LossKind::L1) {
            res.loss += std::abs(diff);
            g.values[i] = diff > 0.0 ? 1.0 / n : (diff < 0.0 ? -1.0 / n : 0.0);
        } else {
            res.loss += diff * diff;
            g.values[i] = 2.0 * diff / n;
        }
    }
    res.loss /= n;

    // d loss / d tap weight: correlate the residual gradient with the sampled input.
    const int H = input.height, W = input.width, K = arch.ksize, c = K / 2;
    const DilationScheme scheme = arch.scheme();
    Tensor dlogits(arch.head_channels(), H, W);
    std::vector<int> cols(W);
    for (int r = 0; r < arch.levels; ++r) {
        for (int i = 0; i < K; ++i) {
            for (int j = 0; j < K; ++j) {
                const int t = (r * K + i) * K + j;
                const int dy = scheme.strides[r] * (i - c), dx = scheme.strides[r] * (j - c);
                for (int x = 0; x < W; ++x) cols[x] = std::clamp(x + dx, 0, W - 1);
                double* dw = dlogits.channel(t);
                for (int ch = 0; ch < input.channels; ++ch) {
                    const double* src = input.channel(ch);
                    const double* gc = g.channel(ch);
                    for (int y = 0; y < H; ++y) {
                        const double* srow = src + static_cast<std::size_t>(std::clamp(y + dy, 0, H - 1)) * W;
                        for (int x = 0; x < W; ++x) {
                            const std::size_t p = static_cast<std::size_t>(y) * W + x;
                            dw[p] += gc[p] * srow[cols[x]];
                        }
                    }
                }
            }
        }
    }
    // Softmax Jacobian: dz = w * (dw - <w, dw>).
    for (std::size_t p = 0; p < plane; ++p) {
        double dot = 0.0;
        for (int t = 0; t < arch.head_channels(); ++t) dot += weights.values[plane * t + p] * dlogits.values[plane * t + p];
        for (int t = 0; t < arch.head_channels(); ++t) {
            double& d = dlogits.values[plane * t + p];
            d = weights.values[plane * t + p] * (d - dot);
        }
    }

    Tensor dout = std::move(dlogits);
    for (int s = arch.stages() - 1; s >= 0; --s) {
        if (s + 1 < arch.stages()) {
            // cache.inputs[s + 1] holds tanh(pre-activation) of stage s.
            const Tensor& act = cache.inputs[s + 1];
            for (std::size_t i = 0; i < dout.values.size(); ++i) dout.values[i] *= 1.0 - act.values[i] * act.values[i];
        }
        Tensor din;
        detail::conv_backward(cache.cols[s], dout, model.params.data() + arch.weight_offset(s), arch.stage_in(s),
                              arch.conv_size, res.grad.data() + arch.weight_offset(s),
                              res.grad.data() + arch.bias_offset(s), s > 0 ? &din : nullptr, H, W);
        dout = std::move(din);
    }
    return res;
}

}  // namespace rainlane
