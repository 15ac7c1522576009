#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "principia/canonical.hpp"
#include "principia/digest.hpp"

namespace principia {

/// Who holds a balance: a person, a journal snapshot, or an escrow slot
/// belonging to a pending bid, review round, or market submission.
struct Owner {
    enum class Kind : std::uint8_t { Person = 0, Journal = 1, Escrow = 2 };

    Kind kind = Kind::Person;
    std::array<std::uint8_t, 32> key{};

    auto operator<=>(const Owner&) const = default;

    static Owner person(const PersonId& p) { return {Kind::Person, p.bytes}; }
    static Owner journal(const JournalId& j) { return {Kind::Journal, j.bytes}; }
    template <class Tag>
    static Owner escrow(const Digest<Tag>& d) {
        return {Kind::Escrow, d.bytes};
    }

    std::string str() const;
    static Owner parse(std::string_view text);  // "person:<hex>", "journal:<hex>", "escrow:<hex>"

    void encode(Writer& w) const { w.u8(static_cast<std::uint8_t>(kind)).raw(key); }
    static Owner decode(Reader& r);
};

}  // namespace principia
