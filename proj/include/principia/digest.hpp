#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace principia {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);  // throws Error(Decode)

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

[[noreturn]] void throw_digest_length(std::size_t got);

/// 32-byte digest tagged by what it identifies. Ordering is byte-lexicographic.
template <class Tag>
struct Digest {
    static constexpr std::size_t kSize = 32;
    std::array<std::uint8_t, kSize> bytes{};

    auto operator<=>(const Digest&) const = default;

    bool is_zero() const {
        return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
    }
    std::string hex() const { return to_hex(bytes); }
    std::string short_hex() const { return hex().substr(0, 12); }

    static Digest from_hex(std::string_view hex) {
        Bytes raw = principia::from_hex(hex);
        Digest d;
        if (raw.size() != kSize) {
            throw_digest_length(raw.size());
        }
        std::copy(raw.begin(), raw.end(), d.bytes.begin());
        return d;
    }

    template <class Other>
    static Digest from(const Digest<Other>& other) {
        return Digest{other.bytes};
    }
};

using ContentHash = Digest<struct ContentHashTag>;
using PersonId = Digest<struct PersonIdTag>;
using JournalId = Digest<struct JournalIdTag>;
using RoundId = Digest<struct RoundIdTag>;
using SubmissionId = Digest<struct SubmissionIdTag>;

}  // namespace principia
