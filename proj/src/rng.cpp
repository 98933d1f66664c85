#include "lyapnet/rng.hpp"

#include "lyapnet/errors.hpp"

namespace lyapnet {

uint64_t RngStream::uniform_index(uint64_t n) {
    if (n == 0) throw InvalidArgument("uniform_index: n must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

// splitmix64 finalizer; decorrelates child seeds even for adjacent indices.
static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t RngStream::derive(uint64_t seed, uint64_t index) {
    return mix(seed ^ mix(index + 1));
}

}  // namespace lyapnet
