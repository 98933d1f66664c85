#pragma once

#include <cstdint>
#include <random>

namespace lyapnet {

// Deterministic stream of doubles. The generator is fixed project-wide to
// mt19937_64 with an explicit 53-bit mantissa mapping, so equal seeds give
// bitwise-identical sequences on every platform (the standard pins the
// engine's output exactly; std::uniform_real_distribution would not be
// portable).
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine_(seed), seed_(seed) {}

    uint64_t seed() const noexcept { return seed_; }

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n), unbiased via rejection.
    uint64_t uniform_index(uint64_t n);

    // Deterministic child-stream seed; used instead of sharing a stream
    // across concurrent tasks.
    static uint64_t derive(uint64_t seed, uint64_t index);

private:
    std::mt19937_64 engine_;
    uint64_t seed_;
};

}  // namespace lyapnet
