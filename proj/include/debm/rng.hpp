#pragma once

#include <cstdint>
#include <random>

namespace debm {

/// The only generator used for stochastic outputs: std::mt19937_64, whose
/// output sequence is fixed by the C++ standard. Uniform and normal variates
/// are derived here rather than through <random> distributions, whose
/// algorithms are implementation-defined.
class Rng {
public:
    static constexpr const char* kGeneratorId = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal by the Marsaglia polar method (one value per call; the
    /// spare is discarded so the stream position depends only on call count
    /// and rejections).
    double normal();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for sub-stream `stream` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

} // namespace debm
