#pragma once

#include <vector>

#include "conv.hpp"
#include "rainlane/kpn.hpp"

namespace rainlane::detail {

struct StackCache {
    std::vector<Tensor> inputs;  // input of every stage
    std::vector<RowMatrix> cols;
};

/// Runs the conv stack and returns head logits (head_channels x h x w).
Tensor run_stack(const KpnModel& model, const Tensor& input, StackCache* cache);

/// In-place per-pixel softmax over the channel axis.
void softmax_channels(Tensor& logits);

/// Applies double-precision tap weights (taps x h x w) to a planar image,
/// without clamping.
Tensor filter_planar(const Tensor& img, const Tensor& weights, const KpnArch& arch);

}  // namespace rainlane::detail
