#include "principia/rng.hpp"

#include <cmath>
#include <numbers>

#include "principia/canonical.hpp"
#include "principia/identity.hpp"

namespace principia {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % bound;
}

double Rng::normal(double mean, double stddev) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

Rng split_rng(std::uint64_t seed, std::string_view agent, std::int64_t day) {
    Writer w;
    w.str("principia.rng").u64(seed).str(agent).i64(day);
    return Rng(content_hash(w.bytes()));
}

}  // namespace principia
