#pragma once

#include <cstddef>
#include <set>

#include "principia/digest.hpp"
#include "principia/money.hpp"

namespace principia {

/// Smallest approval count that satisfies quorum fraction `q` on a board of
/// `board_size`: ceil(q * board_size), computed exactly.
constexpr std::size_t required_approvals(Fraction q, std::size_t board_size) {
    const auto scaled = static_cast<std::uint64_t>(q.ppm) * board_size;
    return static_cast<std::size_t>((scaled + kMicroPerUnit - 1) / kMicroPerUnit);
}

struct QuorumCheck {
    std::size_t required = 0;
    std::set<PersonId> got;  // distinct board members with a valid approval

    bool met() const { return got.size() >= required; }
};

}  // namespace principia
