#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace principia {

enum class ErrorCode : std::uint8_t {
    InvalidKey,
    BadSignature,
    ChainBreak,
    Decode,
    PreconditionFailed,
    UnknownEntity,
    // journal governance
    MissingFounderSignature,
    BadParams,
    QuorumNotMet,
    AlreadySuperseded,
    EmptyBoardResult,
    AlreadyMember,
    NotMember,
    InsufficientFunds,
    NotDescendant,
    PendingProposal,
    // review lifecycle
    JournalSuperseded,
    WrongStatus,
    NotEnoughEligibleReviewers,
    NotAssigned,
    PastDeadline,
    DuplicateReview,
    ScoreOutOfRange,
    TooFewReviews,
    VoteFromNonReviewer,
    // market
    NoFeasibleMatch,
    NotMatched,
    Duplicate,
    SelfScore,
    NotEnoughReviewers,
    // reputation
    NonConvergence,
    // tooling
    Scenario,
    Config,
    Io,
    Locked,
};

/// Stable machine-readable name, e.g. `CHAIN_BREAK`.
std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Sequence number of the offending event when raised during append/replay.
    std::optional<std::uint64_t> seq() const noexcept { return seq_; }
    void set_seq(std::uint64_t seq) noexcept { seq_ = seq; }

private:
    ErrorCode code_;
    std::optional<std::uint64_t> seq_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) {
        throw Error(code, what);
    }
}

}  // namespace principia
