#pragma once

#include <string>
#include <vector>

#include "rainlane/image.hpp"
#include "rainlane/kpn.hpp"

namespace rainlane {

struct LatencyStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p95_ms = 0.0;  // nearest rank

    static LatencyStats from_samples(std::vector<double> samples_ms);
};

struct BenchReport {
    int width = 0;
    int height = 0;
    int iterations = 0;
    int warmup = 0;
    int threads = 1;
    LatencyStats layer1;
    LatencyStats layer2;
    LatencyStats total;         // dual-layer inference
    LatencyStats single_layer;  // layer-1-only inference, timed separately

    /// Columns: width,height,threads,iterations,warmup,stage,mean_ms,median_ms,p95_ms
    std::string to_csv() const;
    std::string to_text() const;
};

/// Times `warmup` untimed then `iterations` timed dual-layer inferences, then
/// the same schedule for layer 1 alone.
BenchReport run_bench(const DlkpnModel& model, const ImageBuffer& img, int iterations, int warmup);

}  // namespace rainlane
