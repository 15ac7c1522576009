#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "principia/canonical.hpp"
#include "principia/digest.hpp"
#include "principia/money.hpp"

namespace principia {

/// Reputation scores are fixed-point with six decimals (1.0 == 1'000'000) so
/// that sums and comparisons in matching are exact.
using RsPoints = std::int64_t;

inline constexpr std::size_t kMinMarketReviewers = 3;

enum class RsUpdate : std::uint8_t { Additive = 0, MovingAverage = 1 };

struct FieldThresholds {
    std::int64_t default_points = 3 * kMicroPerUnit;
    std::map<std::string, std::int64_t> by_field;

    bool operator==(const FieldThresholds&) const = default;

    /// Strictest configured threshold among the keywords, else the default.
    std::int64_t for_keywords(const std::set<std::string>& keywords) const;
    void validate() const;  // every threshold in [1, 5]
};

struct ScientistProfile {
    PersonId person;
    std::set<std::string> keywords;
    RsPoints rs = kMicroPerUnit;
    Micro ask = 0;
    std::uint32_t capacity = 0;
    std::uint32_t active = 0;
    std::uint32_t completed = 0;

    bool has_spare_capacity() const { return active < capacity; }
    void encode(Writer& w) const;
};

enum class SubmissionStatus : std::uint8_t { Submitted, Matched, Scored, ReportScored, Settled, Withdrawn };
std::string_view status_name(SubmissionStatus s) noexcept;

struct MarketSubmission {
    SubmissionId id;
    ContentHash paper;
    PersonId submitter;
    std::set<std::string> keywords;
    Micro bid = 0;
    SubmissionStatus status = SubmissionStatus::Submitted;
    std::uint64_t created_seq = 0;
    std::vector<PersonId> reviewers;
    std::map<PersonId, Micro> asks;  // frozen at match time
    std::map<PersonId, int> paper_scores;
    std::map<PersonId, ContentHash> reports;
    std::map<std::pair<PersonId, PersonId>, int> report_scores;  // (scorer, scoree)
    std::set<PersonId> report_scorers;
    // filled at settlement
    std::map<PersonId, Micro> paid;
    Micro refunded = 0;
    bool accepted = false;

    bool is_reviewer(const PersonId& p) const;
    void encode(Writer& w) const;
};

SubmissionId make_submission_id(const ContentHash& paper, std::uint64_t seq);

struct Candidate {
    PersonId id;
    Micro ask = 0;
    RsPoints rs = 0;
};

/// Chooses `n` candidates maximising total RS subject to total ask <= budget.
///
/// When some feasible pool has an RS spread (max - min) of at least one
/// population standard deviation of the candidate pool, only such "mixed"
/// pools are considered. Equal totals are broken by the lexicographically
/// smallest sorted id list. Returns the chosen ids sorted, or nullopt when no
/// pool fits the budget.
std::optional<std::vector<PersonId>> match_reviewers(std::span<const Candidate> pool, Micro budget,
                                                      std::size_t n = kMinMarketReviewers);

/// True iff (max - min)^2 >= population variance of `pool_rs`, evaluated exactly.
bool is_mixed(std::span<const RsPoints> chosen_rs, std::span<const RsPoints> pool_rs);

/// Sum of the three cheapest asks times 1.1, rounded up. Throws NotEnoughReviewers.
Micro suggest_fair_bid(std::span<const Micro> eligible_asks);

struct ReviewerSettlement {
    PersonId reviewer;
    Micro ask = 0;
    int report_score_sum = 0;
    int report_score_count = 0;
    bool paid = false;
    RsPoints rs_before = 0;
    RsPoints rs_after = 0;
};

struct SettlementResult {
    std::vector<ReviewerSettlement> reviewers;
    Micro refund_to_authors = 0;  // unpaid asks + unused budget
    int paper_score_sum = 0;
    int paper_score_count = 0;
    bool accepted = false;

    double paper_score() const {
        return paper_score_count == 0 ? 0.0 : static_cast<double>(paper_score_sum) / paper_score_count;
    }
};

struct SettlementRules {
    std::int64_t report_threshold = 3 * kMicroPerUnit;  // inclusive
    std::int64_t acceptance_threshold = 3 * kMicroPerUnit;  // strict
    RsUpdate rs_update = RsUpdate::Additive;
    Fraction ema_weight{500'000};
};

/// Mean of integer scores in RS points, rounded half up.
RsPoints mean_points(int sum, int count);

/// Settlement of one submission from its recorded scores. `rs_before` holds
/// the current RS of each reviewer.
SettlementResult settle_submission(const MarketSubmission& submission,
                                   const std::map<PersonId, RsPoints>& rs_before,
                                   const SettlementRules& rules);

}  // namespace principia
