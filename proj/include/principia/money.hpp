#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace principia {

/// Integer micro-credits; 1 credit = 1'000'000 micro.
using Micro = std::int64_t;
inline constexpr std::int64_t kMicroPerUnit = 1'000'000;

/// Simulated days since epoch.
using Day = std::int64_t;

/// A fraction in [0, 1] stored exactly as parts-per-million.
struct Fraction {
    std::uint32_t ppm = 0;

    auto operator<=>(const Fraction&) const = default;

    double value() const { return static_cast<double>(ppm) / kMicroPerUnit; }
    std::string str() const;

    static Fraction from_ppm(std::uint32_t ppm);
    /// Nearest ppm; rejects values outside [0, 1].
    static Fraction from_double(double v);
    /// Exact decimal parse ("0.66", "1", "0.333333"); at most six decimals.
    static Fraction parse(std::string_view text);
};

/// Parse a decimal amount of credits ("12.5") into micro-credits, exactly.
Micro parse_credits(std::string_view text);
std::string format_credits(Micro amount);

/// Largest-remainder apportionment of `total` in proportion to `weights`.
///
/// Each share is floor(total * w / W); the leftover units go one each to the
/// largest fractional remainders, ties to the lower index. The result sums to
/// `total` exactly. Weights must be non-negative with a positive sum.
std::vector<Micro> apportion(Micro total, std::span<const __int128> weights);

}  // namespace principia
