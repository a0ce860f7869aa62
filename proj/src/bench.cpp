#include "rainlane/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rainlane/error.hpp"
#include "rainlane/parallel.hpp"

namespace rainlane {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

LatencyStats LatencyStats::from_samples(std::vector<double> samples) {
    LatencyStats s;
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean_ms = sum / static_cast<double>(n);
    s.median_ms = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95_ms = samples[std::max<std::size_t>(rank, 1) - 1];
    return s;
}

BenchReport run_bench(const DlkpnModel& model, const ImageBuffer& img, int iterations, int warmup) {
    if (iterations < 1) throw InvalidArgument("bench needs at least one iteration");
    if (warmup < 0) throw InvalidArgument("warmup count must be >= 0");
    BenchReport report;
    report.width = img.width();
    report.height = img.height();
    report.iterations = iterations;
    report.warmup = warmup;
    report.threads = thread_count();

    std::vector<double> l1, l2, total, single;
    for (int i = 0; i < warmup + iterations; ++i) {
        const auto t0 = Clock::now();
        const ImageBuffer mid = kpn_restore(model.layer1, img);
        const auto t1 = Clock::now();
        const ImageBuffer out = kpn_restore(model.layer2, mid);
        const auto t2 = Clock::now();
        if (i < warmup) continue;
        l1.push_back(elapsed_ms(t0, t1));
        l2.push_back(elapsed_ms(t1, t2));
        total.push_back(elapsed_ms(t0, t2));
    }
    for (int i = 0; i < warmup + iterations; ++i) {
        const auto t0 = Clock::now();
        const ImageBuffer mid = kpn_restore(model.layer1, img);
        const auto t1 = Clock::now();
        if (i >= warmup) single.push_back(elapsed_ms(t0, t1));
    }
    report.layer1 = LatencyStats::from_samples(l1);
    report.layer2 = LatencyStats::from_samples(l2);
    report.total = LatencyStats::from_samples(total);
    report.single_layer = LatencyStats::from_samples(single);
    return report;
}

std::string BenchReport::to_csv() const {
    std::ostringstream out;
    out << "width,height,threads,iterations,warmup,stage,mean_ms,median_ms,p95_ms\n";
    const std::pair<const char*, const LatencyStats*> rows[] = {
        {"layer1", &layer1}, {"layer2", &layer2}, {"total", &total}, {"single_layer", &single_layer}};
    for (const auto& [name, s] : rows) {
        out << width << ',' << height << ',' << threads << ',' << iterations << ',' << warmup << ',' << name << ','
            << fmt(s->mean_ms) << ',' << fmt(s->median_ms) << ',' << fmt(s->p95_ms) << '\n';
    }
    return out.str();
}

std::string BenchReport::to_text() const {
    std::ostringstream out;
    out << "image " << width << "x" << height << ", " << iterations << " iterations after " << warmup
        << " warmup, " << threads << " thread(s)\n";
    char line[128];
    std::snprintf(line, sizeof(line), "%-14s %10s %10s %10s\n", "stage", "mean ms", "median ms", "p95 ms");
    out << line;
    const std::pair<const char*, const LatencyStats*> rows[] = {
        {"layer1", &layer1}, {"layer2", &layer2}, {"dual (total)", &total}, {"single layer", &single_layer}};
    for (const auto& [name, s] : rows) {
        std::snprintf(line, sizeof(line), "%-14s %10.3f %10.3f %10.3f\n", name, s->mean_ms, s->median_ms, s->p95_ms);
        out << line;
    }
    return out.str();
}

}  // namespace rainlane
