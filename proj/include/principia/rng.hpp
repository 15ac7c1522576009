#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "principia/digest.hpp"

namespace principia {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so the conversions to
/// integers and reals are done here to keep runs identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Seed from the first eight bytes of a digest.
    template <class Tag>
    explicit Rng(const Digest<Tag>& d) : engine_(seed_of(d.bytes)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t bound);

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller.
    double normal(double mean, double stddev);

private:
    static std::uint64_t seed_of(const std::array<std::uint8_t, 32>& b) {
        std::uint64_t s = 0;
        for (int i = 0; i < 8; ++i) s = s << 8 | b[static_cast<std::size_t>(i)];
        return s;
    }

    std::mt19937_64 engine_;
};

/// Independent per-agent, per-day stream: keyed by the agent's stable name, so
/// adding or removing other agents never perturbs it.
Rng split_rng(std::uint64_t seed, std::string_view agent, std::int64_t day);

}  // namespace principia
