#pragma once

#include <cstdint>
#include <random>

namespace linea {

/// Deterministic uniform stream. The engine is mt19937_64 (bit-exact by the
/// standard); the [0,1) mapping is done by hand because std distribution
/// implementations are not portable across standard libraries.
class UniformStream {
public:
    /// Stream for (seed, partition). Partition 0 with partition count 1 is the
    /// bit-exact single-partition reference.
    explicit UniformStream(std::uint64_t seed, std::uint64_t partition = 0)
        : eng_(mix(seed, partition)) {}

    /// Uniform in [0, 1) with 53 random bits.
    double next() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t partition) {
        // splitmix64 finalizer over the (seed, partition) pair
        std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (partition + 1);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    std::mt19937_64 eng_;
};

} // namespace linea
