#pragma once

// Kernel prediction network: a small conv stack maps an image to levels*K*K
// logits per pixel, a per-pixel softmax turns them into a normalized
// KernelField, and the field filters the same image. Two such layers form the
// dual-layer restorer: layer 2 predicts kernels from, and filters, the output
// of layer 1.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rainlane/image.hpp"
#include "rainlane/kernel_filter.hpp"

namespace rainlane {

struct KpnArch {
    int in_channels = 3;
    std::vector<int> hidden{32, 32, 32};  // widths of the tanh conv stages
    int conv_size = 3;                    // receptive field of every conv stage
    int ksize = 5;                        // predicted kernel size K
    int levels = 4;                       // dilation levels R, strides 2^r

    int stages() const { return static_cast<int>(hidden.size()) + 1; }
    int stage_in(int s) const { return s == 0 ? in_channels : hidden[s - 1]; }
    int stage_out(int s) const { return s + 1 == stages() ? head_channels() : hidden[s]; }
    int head_channels() const { return levels * ksize * ksize; }
    /// Offset of stage s weights in the flat parameter vector; its bias follows them.
    std::size_t weight_offset(int s) const;
    std::size_t bias_offset(int s) const;
    std::size_t param_count() const;
    /// Rows of context each conv stage consumes on either side.
    int halo() const { return stages() * (conv_size / 2); }
    DilationScheme scheme() const { return DilationScheme::hierarchical(levels); }

    void validate() const;
    bool operator==(const KpnArch&) const = default;
};

struct InitOptions {
    double head_weight_scale = 1.0;  // multiplies the Glorot range of the head stage
    double identity_logit = 2.0;     // bias of the level-0 center tap
};

struct KpnModel {
    KpnArch arch;
    std::vector<double> params;

    std::size_t param_count() const { return params.size(); }

    /// Glorot-uniform conv stages, zero biases, and an identity-leaning head.
    /// Parameters are rounded to float precision so checkpoints are lossless.
    static KpnModel initialize(const KpnArch& arch, std::uint64_t seed, const InitOptions& opts = {});
};

struct DlkpnModel {
    KpnModel layer1;
    KpnModel layer2;
};

struct KpnOutput {
    KernelField field;
    ImageBuffer restored;
};

struct DlkpnOutput {
    ImageBuffer mid;
    ImageBuffer final;
};

KpnOutput kpn_forward(const KpnModel& model, const ImageBuffer& img);

/// kpn_forward without keeping the full-image kernel field around.
ImageBuffer kpn_restore(const KpnModel& model, const ImageBuffer& img);

DlkpnOutput dlkpn_infer(const DlkpnModel& model, const ImageBuffer& img);

enum class LossKind { L1, L2 };

/// Mean absolute difference over all pixels and channels.
double loss_l1(const ImageBuffer& pred, const ImageBuffer& target);
/// Mean squared difference over all pixels and channels.
double loss_l2(const ImageBuffer& pred, const ImageBuffer& target);
double loss_value(LossKind kind, const ImageBuffer& pred, const ImageBuffer& target);

std::string to_string(LossKind kind);
LossKind parse_loss(const std::string& text);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad;  // same layout as KpnModel::params
};

/// Exact gradient of the loss between restored and target with respect to
/// every parameter. The output clamp passes gradients straight through and the
/// L1 subgradient at zero residual is 0.
LossGradient backward(const KpnModel& model, const ImageBuffer& img, const ImageBuffer& target,
                      LossKind kind = LossKind::L1);

struct TrainPair {
    ImageBuffer input;
    ImageBuffer target;
};

struct TrainConfig {
    KpnArch arch;
    InitOptions init;
    LossKind loss = LossKind::L2;
    double learning_rate = 0.5;
    double momentum = 0.9;
    int steps = 500;
    int batch = 4;
    int crop = 32;
    std::uint64_t seed = 0;

    void validate() const;

    /// Settings for a second layer trained on this layer's output: seed + 1,
    /// a near-identity start and a smaller step.
    TrainConfig second_layer() const;
};

struct StepInfo {
    int step = 0;     // 1-based
    double loss = 0;  // batch loss before the update
};

struct TrainResult {
    KpnModel model;
    std::vector<double> losses;  // one batch loss per step
};

using StepCallback = std::function<void(const StepInfo&, const KpnModel&)>;

/// SGD with momentum over seeded random crops. `start` overrides the seeded
/// initialization when given.
TrainResult train_layer(const std::vector<TrainPair>& pairs, const TrainConfig& cfg,
                        const KpnModel* start = nullptr, const StepCallback& on_step = {});

struct DlkpnTraining {
    DlkpnModel model;
    std::vector<ImageBuffer> layer2_inputs;  // layer-1 restorations of the rainy inputs
    std::vector<double> layer1_losses;
    std::vector<double> layer2_losses;
};

/// Trains layer 1 on (rainy -> clean), freezes it, then trains layer 2 on
/// (layer1(rainy) -> clean).
DlkpnTraining train_dlkpn(const std::vector<TrainPair>& rainy_clean, const TrainConfig& cfg1,
                          const TrainConfig& cfg2);

/// Mean of `losses` over a trailing/leading window, used for convergence checks.
double window_mean(const std::vector<double>& losses, std::size_t begin, std::size_t count);

}  // namespace rainlane
