#include <algorithm>
#include <cmath>
#include <string>

#include "rainlane/error.hpp"
#include "rainlane/kpn.hpp"
#include "rainlane/random.hpp"

namespace rainlane {

void TrainConfig::validate() const {
    arch.validate();
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("learning_rate must be finite and >= 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must lie in [0,1)");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (batch < 1) throw InvalidArgument("batch must be >= 1");
    if (crop < 1) throw InvalidArgument("crop must be >= 1");
}

TrainConfig TrainConfig::second_layer() const {
    TrainConfig next = *this;
    next.seed = seed + 1;
    next.init.identity_logit = 6.0;
    next.learning_rate = 0.1;
    return next;
}

double window_mean(const std::vector<double>& losses, std::size_t begin, std::size_t count) {
    const std::size_t end = std::min(losses.size(), begin + count);
    if (begin >= end) return 0.0;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += losses[i];
    return sum / static_cast<double>(end - begin);
}

TrainResult train_layer(const std::vector<TrainPair>& pairs, const TrainConfig& cfg, const KpnModel* start,
                        const StepCallback& on_step) {
    cfg.validate();
    if (pairs.empty()) throw DataError("train_layer: empty training set");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const TrainPair& p = pairs[i];
        if (!p.input.same_shape(p.target)) {
            throw DataError("train_layer: pair " + std::to_string(i) + " input/target shapes differ");
        }
        if (p.input.channels() != cfg.arch.in_channels) {
            throw DataError("train_layer: pair " + std::to_string(i) + " has the wrong channel count");
        }
        if (p.input.width() < cfg.crop || p.input.height() < cfg.crop) {
            throw InvalidArgument("train_layer: crop " + std::to_string(cfg.crop) + " exceeds pair " +
                                  std::to_string(i) + " dimensions");
        }
    }
    if (start && !(start->arch == cfg.arch)) throw InvalidArgument("train_layer: start model architecture differs");

    TrainResult res{start ? *start : KpnModel::initialize(cfg.arch, cfg.seed, cfg.init), {}};
    KpnModel& model = res.model;
    std::vector<double> velocity(model.params.size(), 0.0);
    std::vector<double> grad(model.params.size());
    // Crop sampling draws from its own stream so initialization and sampling
    // stay independent.
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    for (int step = 1; step <= cfg.steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (int b = 0; b < cfg.batch; ++b) {
            const TrainPair& pair = pairs[rng.below(pairs.size())];
            const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(pair.input.height() - cfg.crop + 1)));
            const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(pair.input.width() - cfg.crop + 1)));
            const LossGradient lg = backward(model, crop(pair.input, y0, x0, cfg.crop, cfg.crop),
                                             crop(pair.target, y0, x0, cfg.crop, cfg.crop), cfg.loss);
            loss += lg.loss;
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += lg.grad[i];
        }
        loss /= cfg.batch;
        if (!std::isfinite(loss)) {
            throw NumericalError("training loss became non-finite at step " + std::to_string(step));
        }
        res.losses.push_back(loss);
        if (on_step) on_step(StepInfo{step, loss}, model);

        const double scale = 1.0 / cfg.batch;
        for (std::size_t i = 0; i < model.params.size(); ++i) {
            velocity[i] = cfg.momentum * velocity[i] + grad[i] * scale;
            const double next = static_cast<float>(model.params[i] - cfg.learning_rate * velocity[i]);
            if (!std::isfinite(next)) {
                throw NumericalError("parameter " + std::to_string(i) + " became non-finite at step " +
                                     std::to_string(step));
            }
            model.params[i] = next;
        }
    }
    return res;
}

DlkpnTraining train_dlkpn(const std::vector<TrainPair>& rainy_clean, const TrainConfig& cfg1,
                          const TrainConfig& cfg2) {
    if (rainy_clean.empty()) throw DataError("train_dlkpn: empty training set");
    DlkpnTraining out;
    TrainResult first = train_layer(rainy_clean, cfg1);
    out.model.layer1 = std::move(first.model);
    out.layer1_losses = std::move(first.losses);

    std::vector<TrainPair> second;
    second.reserve(rainy_clean.size());
    for (const TrainPair& p : rainy_clean) {
        ImageBuffer mid = kpn_restore(out.model.layer1, p.input);
        out.layer2_inputs.push_back(mid);
        second.push_back({std::move(mid), p.target});
    }
    TrainResult stage2 = train_layer(second, cfg2);
    out.model.layer2 = std::move(stage2.model);
    out.layer2_losses = std::move(stage2.losses);
    return out;
}

}  // namespace rainlane
