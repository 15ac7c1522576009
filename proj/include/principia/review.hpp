#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "principia/canonical.hpp"
#include "principia/identity.hpp"
#include "principia/money.hpp"

namespace principia {

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;
/// Scores strictly above this mean accept a paper.
inline constexpr int kAcceptAbove = 3;

enum class RoundStatus : std::uint8_t {
    Bid,
    AcceptedForReview,
    UnderReview,
    Decided,
    FinalVote,
    Settled,
    Failed,
};
std::string_view status_name(RoundStatus s) noexcept;

enum class Decision : std::uint8_t { Reject = 0, Accept = 1 };

struct Payout {
    std::vector<Micro> reviewer_amounts;  // in the order the scores were given
    Micro journal_share = 0;
    Micro refund_to_authors = 0;

    Micro total() const;
};

/// Raw fee-split weights before clipping: share_u = numerators[u] / denominator.
/// The numerators sum to the denominator; individual numerators can be negative.
struct ShareWeights {
    std::vector<std::int64_t> numerators;
    std::int64_t denominator = 1;
};

/// share_u = 1/n + |s_u-3| / (2 sum|s_v-3|) - |s_u-mean| / (2 sum|s_v-mean|), with a
/// uniform 1/n standing in for either ratio when its denominator is zero.
ShareWeights fee_share_weights(std::span<const int> scores);

/// Splits a review fee: the journal keeps `keep_fraction`, reviewers share the
/// rest by fee_share_weights(). Negative shares are clipped to zero and the
/// remaining shares renormalised, then the whole fee is apportioned by largest
/// remainder so journal_share + sum(reviewer_amounts) == fee exactly.
Payout split_review_fee(Micro fee, Fraction keep_fraction, std::span<const int> scores);

/// Fee split when a round fails after review started: the journal keeps its
/// fraction, the rest goes back to the authors.
Payout split_failed_round(Micro fee, Fraction keep_fraction);

/// Accept iff mean score > 3. Throws ScoreOutOfRange or TooFewReviews (empty).
Decision decide_publication(std::span<const int> scores);

/// Fewest reviews that allow a decision once the deadline has passed.
constexpr std::size_t min_reviews_for_decision(std::size_t reviewers_per_paper) {
    return (reviewers_per_paper + 1) / 2;
}

/// Strict majority of assigned reviewers.
constexpr bool final_vote_passes(std::size_t approvals, std::size_t assigned) {
    return 2 * approvals > assigned;
}

ContentHash assignment_seed(const JournalId& journal, const ContentHash& paper, std::uint64_t nonce);

/// n reviewers drawn uniformly without replacement from board minus authors.
/// Result sorted. Throws NotEnoughEligibleReviewers.
std::vector<PersonId> select_reviewers(std::span<const PersonId> board,
                                       const std::set<PersonId>& authors, std::size_t n,
                                       const ContentHash& seed);

/// Public stand-in for a reviewer on an anonymous journal.
ContentHash pseudonym(const PersonId& reviewer, const ContentHash& paper, const RoundId& round,
                      const ContentHash& salt);

Bytes accept_proposal(const RoundId& round);
Bytes confirm_proposal(const RoundId& round);
/// What authors sign when publishing a paper.
Bytes authorship_message(const ContentHash& paper);

RoundId make_round_id(const ContentHash& paper, const JournalId& journal, std::uint64_t seq);

struct ReviewRound {
    RoundId id;
    ContentHash paper;
    JournalId journal;
    PersonId submitter;
    std::set<PersonId> authors;
    Micro fee = 0;
    RoundStatus status = RoundStatus::Bid;
    std::uint64_t created_seq = 0;
    Day created_at = 0;
    std::vector<PersonId> reviewers;
    std::map<PersonId, int> scores;
    std::map<PersonId, ContentHash> reports;
    Day deadline = 0;
    std::optional<Decision> decision;
    std::optional<ContentHash> final_version;
    Day final_deadline = 0;
    std::map<PersonId, bool> final_votes;
    bool published = false;
    std::optional<Payout> payout;
    std::string note;

    bool is_reviewer(const PersonId& p) const;
    std::vector<int> submitted_scores() const;  // ordered by reviewer id
    void encode(Writer& w) const;
};

}  // namespace principia
