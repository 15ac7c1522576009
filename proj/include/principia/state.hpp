#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "principia/events.hpp"
#include "principia/journal.hpp"
#include "principia/market.hpp"
#include "principia/reputation.hpp"
#include "principia/review.hpp"

namespace principia {

/// Rules fixed for the lifetime of a ledger; stored in the ledger header.
struct ProtocolConfig {
    Day join_expiry_days = 14;
    std::int64_t report_threshold = 3 * kMicroPerUnit;
    RsPoints initial_rs = kMicroPerUnit;
    RsUpdate rs_update = RsUpdate::Additive;
    Fraction ema_weight{500'000};
    FieldThresholds thresholds;
    std::uint32_t reviewers_per_submission = 3;

    bool operator==(const ProtocolConfig&) const = default;

    void validate() const;
    void encode(Writer& w) const;
    static ProtocolConfig decode(Reader& r);
    SettlementRules settlement_rules() const;
};

struct PendingJoin {
    PersonId candidate;
    Micro bid = 0;
    std::uint64_t bid_seq = 0;
    Day bid_day = 0;

    Owner escrow(const JournalId& journal) const;
};

struct JournalRecord {
    Journal journal;
    std::optional<JournalId> descendant;
    std::optional<Day> superseded_at;
    std::vector<ContentHash> publications;
    std::optional<PendingJoin> pending_join;

    bool live() const { return !descendant.has_value(); }
};

struct PaperRecord {
    ContentHash hash;
    std::set<PersonId> authors;
    std::set<std::string> keywords;
    std::set<ContentHash> cites;
    Day registered_at = 0;
    std::optional<JournalId> published_in;
    Day published_at = 0;
    std::optional<RoundId> active_round;
    std::optional<SubmissionId> market_submission;
};

/// Protocol state. Only ever changed through apply_event(); every field takes
/// part in digest().
class State {
public:
    explicit State(ProtocolConfig config = {}) : config_(std::move(config)) {}

    const ProtocolConfig& config() const { return config_; }
    const KeyRegistry& keys() const { return keys_; }
    std::optional<PersonId> registrar() const { return registrar_; }
    bool genesis_open() const { return genesis_open_; }
    Micro minted() const { return minted_; }
    Day now() const { return now_; }
    std::uint64_t event_count() const { return event_count_; }

    const std::map<Owner, Micro>& wallets() const { return wallets_; }
    const std::map<JournalId, JournalRecord>& journals() const { return journals_; }
    const std::map<ContentHash, PaperRecord>& papers() const { return papers_; }
    const std::map<RoundId, ReviewRound>& rounds() const { return rounds_; }
    const std::map<PersonId, ScientistProfile>& profiles() const { return profiles_; }
    const std::map<SubmissionId, MarketSubmission>& submissions() const { return submissions_; }

    Micro balance(const Owner& owner) const;
    Micro total_balance() const;

    const JournalRecord& journal(const JournalId& id) const;
    const ReviewRound& round(const RoundId& id) const;
    const MarketSubmission& submission(const SubmissionId& id) const;
    const PaperRecord& paper(const ContentHash& hash) const;

    /// The chain of snapshots from the original journal to `id`.
    std::vector<JournalId> lineage(const JournalId& id) const;

    /// Market candidates for a submission: keyword overlap, spare capacity, not an author.
    std::vector<Candidate> eligible_candidates(const std::set<std::string>& keywords,
                                               const std::set<PersonId>& exclude) const;

    /// Board service intervals up to `at_day` (open intervals end there).
    std::vector<ServiceInterval> service_intervals(Day at_day) const;
    ReputationInput reputation_input(Day at_day) const;

    /// Validates `event` against the current state and applies it atomically:
    /// on error nothing changes. Does not check chain links or signatures
    /// (the ledger does).
    void apply(const Event& event);

    /// Hash of the canonical encoding of the full state.
    ContentHash digest() const;

    /// Throws PreconditionFailed naming the first violated invariant.
    void check_invariants() const;

private:
    friend struct Transition;

    ProtocolConfig config_;
    KeyRegistry keys_;
    std::optional<PersonId> registrar_;
    bool genesis_open_ = true;
    Micro minted_ = 0;
    Day now_ = 0;
    std::uint64_t event_count_ = 0;
    std::map<Owner, Micro> wallets_;
    std::map<JournalId, JournalRecord> journals_;
    std::map<ContentHash, PaperRecord> papers_;
    std::map<RoundId, ReviewRound> rounds_;
    std::map<PersonId, ScientistProfile> profiles_;
    std::map<SubmissionId, MarketSubmission> submissions_;
    std::set<ContentHash> consumed_proposals_;
};

}  // namespace principia
