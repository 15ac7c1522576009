#pragma once

// Internal: mutable access to State for the per-kind transition handlers.
// Every handler validates first and only then mutates, so a thrown error
// leaves the state untouched.

#include "principia/error.hpp"
#include "principia/state.hpp"

namespace principia {

struct Transition {
    State& s;
    const Event& e;

    KeyRegistry& keys() { return s.keys_; }
    std::map<JournalId, JournalRecord>& journals() { return s.journals_; }
    std::map<ContentHash, PaperRecord>& papers() { return s.papers_; }
    std::map<RoundId, ReviewRound>& rounds() { return s.rounds_; }
    std::map<PersonId, ScientistProfile>& profiles() { return s.profiles_; }
    std::map<SubmissionId, MarketSubmission>& submissions() { return s.submissions_; }
    std::optional<PersonId>& registrar() { return s.registrar_; }
    bool genesis_open() const { return s.genesis_open_; }
    Micro& minted() { return s.minted_; }

    const PersonId& actor() const { return e.actor; }
    Day now() const { return e.timestamp; }
    std::uint64_t seq() const { return e.seq; }

    JournalRecord& journal(const JournalId& id);
    ReviewRound& round(const RoundId& id);
    MarketSubmission& submission(const SubmissionId& id);
    PaperRecord& paper(const ContentHash& id);

    void require_funds(const Owner& from, Micro amount) const;
    /// Caller must have checked funds.
    void move(const Owner& from, const Owner& to, Micro amount);
    void credit(const Owner& to, Micro amount);

    bool consumed(ByteView proposal) const;
    void consume(ByteView proposal);
};

void apply_body(Transition& t, const JournalCreate& b);
void apply_body(Transition& t, const JournalModify& b);
void apply_body(Transition& t, const JoinBid& b);
void apply_body(Transition& t, const JoinDecision& b);
void apply_body(Transition& t, const BalanceSpend& b);
void apply_body(Transition& t, const BalanceTransfer& b);

void apply_body(Transition& t, const PaperPublish& b);
void apply_body(Transition& t, const CitationDeclare& b);
void apply_body(Transition& t, const ReviewBid& b);
void apply_body(Transition& t, const ReviewAcceptVote& b);
void apply_body(Transition& t, const ReviewerAssignment& b);
void apply_body(Transition& t, const ReviewSubmit& b);
void apply_body(Transition& t, const PublicationDecision& b);
void apply_body(Transition& t, const FinalVersion& b);
void apply_body(Transition& t, const FinalVote& b);
void apply_body(Transition& t, const FeeSettlement& b);

void apply_body(Transition& t, const MarketAsk& b);
void apply_body(Transition& t, const MarketSubmit& b);
void apply_body(Transition& t, const MarketMatch& b);
void apply_body(Transition& t, const MarketReview& b);
void apply_body(Transition& t, const MarketReportScore& b);
void apply_body(Transition& t, const MarketSettlement& b);

}  // namespace principia
