#include "principia/error.hpp"

namespace principia {

std::string_view code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidKey: return "INVALID_KEY";
        case ErrorCode::BadSignature: return "BAD_SIGNATURE";
        case ErrorCode::ChainBreak: return "CHAIN_BREAK";
        case ErrorCode::Decode: return "DECODE";
        case ErrorCode::PreconditionFailed: return "PRECONDITION_FAILED";
        case ErrorCode::UnknownEntity: return "UNKNOWN_ENTITY";
        case ErrorCode::MissingFounderSignature: return "MISSING_FOUNDER_SIGNATURE";
        case ErrorCode::BadParams: return "BAD_PARAMS";
        case ErrorCode::QuorumNotMet: return "QUORUM_NOT_MET";
        case ErrorCode::AlreadySuperseded: return "ALREADY_SUPERSEDED";
        case ErrorCode::EmptyBoardResult: return "EMPTY_BOARD_RESULT";
        case ErrorCode::AlreadyMember: return "ALREADY_MEMBER";
        case ErrorCode::NotMember: return "NOT_MEMBER";
        case ErrorCode::InsufficientFunds: return "INSUFFICIENT_FUNDS";
        case ErrorCode::NotDescendant: return "NOT_DESCENDANT";
        case ErrorCode::PendingProposal: return "PENDING_PROPOSAL";
        case ErrorCode::JournalSuperseded: return "JOURNAL_SUPERSEDED";
        case ErrorCode::WrongStatus: return "WRONG_STATUS";
        case ErrorCode::NotEnoughEligibleReviewers: return "NOT_ENOUGH_ELIGIBLE_REVIEWERS";
        case ErrorCode::NotAssigned: return "NOT_ASSIGNED";
        case ErrorCode::PastDeadline: return "PAST_DEADLINE";
        case ErrorCode::DuplicateReview: return "DUPLICATE_REVIEW";
        case ErrorCode::ScoreOutOfRange: return "SCORE_OUT_OF_RANGE";
        case ErrorCode::TooFewReviews: return "TOO_FEW_REVIEWS";
        case ErrorCode::VoteFromNonReviewer: return "VOTE_FROM_NON_REVIEWER";
        case ErrorCode::NoFeasibleMatch: return "NO_FEASIBLE_MATCH";
        case ErrorCode::NotMatched: return "NOT_MATCHED";
        case ErrorCode::Duplicate: return "DUPLICATE";
        case ErrorCode::SelfScore: return "SELF_SCORE";
        case ErrorCode::NotEnoughReviewers: return "NOT_ENOUGH_REVIEWERS";
        case ErrorCode::NonConvergence: return "NON_CONVERGENCE";
        case ErrorCode::Scenario: return "SCENARIO";
        case ErrorCode::Config: return "CONFIG";
        case ErrorCode::Io: return "IO";
        case ErrorCode::Locked: return "LOCKED";
    }
    return "UNKNOWN";
}

}  // namespace principia
