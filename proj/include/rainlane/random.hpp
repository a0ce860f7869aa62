#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rainlane {

/// Portable seeded generator: std::mt19937_64 (its output sequence is fixed by
/// the C++ standard) with hand-written conversions, because the standard
/// distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller (cosine branch only, no cached pair).
    double normal();

private:
    std::mt19937_64 engine_;
};

/// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace rainlane
