#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "principia/canonical.hpp"
#include "principia/identity.hpp"
#include "principia/journal.hpp"
#include "principia/money.hpp"
#include "principia/wallet.hpp"

namespace principia {

// Event bodies, one per protocol transition. The order of the EventBody
// variant alternatives matches EventKind and is part of the wire format.

struct KeyRegister {
    Scheme scheme = Scheme::Ed25519;
    Bytes public_key;
    bool validated = false;
};

/// Credits created during the genesis phase only.
struct Mint {
    PersonId to;
    Micro amount = 0;
};

struct JournalCreate {
    std::string title;
    std::set<PersonId> founders;
    JournalParams params;
    std::vector<Signature> signatures;
};

struct JournalModify {
    JournalId journal;
    JournalChange change;
    std::vector<Signature> approvals;
};

struct JoinBid {
    JournalId journal;
    Micro bid = 0;
};

struct JoinDecision {
    JournalId journal;
    std::vector<Signature> approvals;
};

struct BalanceSpend {
    JournalId journal;
    Micro amount = 0;
    Owner recipient;
    std::uint64_t nonce = 0;
    std::vector<Signature> approvals;
};

struct BalanceTransfer {
    JournalId ancestor;
    JournalId descendant;
    std::vector<Signature> approvals;
};

struct PaperPublish {
    ContentHash paper;
    std::set<PersonId> authors;
    std::vector<Signature> author_signatures;
    std::set<std::string> keywords;
    std::set<ContentHash> cites;
};

struct ReviewBid {
    ContentHash paper;
    JournalId journal;
    Micro fee = 0;
};

struct ReviewAcceptVote {
    RoundId round;
    std::vector<Signature> approvals;
    std::optional<Signature> author_confirmation;
};

struct ReviewerAssignment {
    RoundId round;
};

struct ReviewSubmit {
    RoundId round;
    std::uint8_t score = 0;
    ContentHash report;
};

struct PublicationDecision {
    RoundId round;
};

struct FinalVersion {
    RoundId round;
    ContentHash final_version;
};

struct FinalVote {
    RoundId round;
    bool approve = false;
};

struct FeeSettlement {
    RoundId round;
};

struct CitationDeclare {
    ContentHash paper;
    std::set<ContentHash> cites;
};

struct MarketSubmit {
    ContentHash paper;
    std::set<std::string> keywords;
    Micro bid = 0;
};

struct MarketMatch {
    SubmissionId submission;
    std::vector<PersonId> reviewers;
};

struct MarketReview {
    SubmissionId submission;
    std::uint8_t score = 0;
    ContentHash report;
};

struct MarketReportScore {
    SubmissionId submission;
    std::vector<std::pair<PersonId, std::uint8_t>> scores;  // scoree -> score
};

struct MarketSettlement {
    SubmissionId submission;
};

/// A reviewer's standing offer in the minimal market (create or update).
struct MarketAsk {
    Micro fee = 0;
    std::set<std::string> keywords;
    std::uint32_t capacity = 0;
};

enum class EventKind : std::uint8_t {
    KeyRegister,
    JournalCreate,
    JournalModify,
    JoinBid,
    JoinDecision,
    BalanceSpend,
    BalanceTransfer,
    PaperPublish,
    ReviewBid,
    ReviewAcceptVote,
    ReviewerAssignment,
    ReviewSubmit,
    PublicationDecision,
    FinalVersion,
    FinalVote,
    FeeSettlement,
    CitationDeclare,
    MarketSubmit,
    MarketMatch,
    MarketReview,
    MarketReportScore,
    MarketSettlement,
    Mint,
    MarketAsk,
};

using EventBody =
    std::variant<KeyRegister, JournalCreate, JournalModify, JoinBid, JoinDecision, BalanceSpend,
                 BalanceTransfer, PaperPublish, ReviewBid, ReviewAcceptVote, ReviewerAssignment,
                 ReviewSubmit, PublicationDecision, FinalVersion, FinalVote, FeeSettlement,
                 CitationDeclare, MarketSubmit, MarketMatch, MarketReview, MarketReportScore,
                 MarketSettlement, Mint, MarketAsk>;

std::string_view kind_name(EventKind k) noexcept;
inline EventKind kind_of(const EventBody& body) { return static_cast<EventKind>(body.index()); }

void encode_body(Writer& w, const EventBody& body);
EventBody decode_body(Reader& r, EventKind kind);
/// Single-line `key=value` rendering with full hex.
std::string describe_body(const EventBody& body);

void encode_signature(Writer& w, const Signature& s);
Signature decode_signature(Reader& r);

struct Event {
    std::uint64_t seq = 0;
    ContentHash prev_hash;
    Day timestamp = 0;
    PersonId actor;
    EventBody body;
    Signature signature;

    EventKind kind() const { return kind_of(body); }

    /// Canonical bytes covered by the actor's signature.
    Bytes signing_bytes() const;
    /// Canonical bytes of the whole event including the signature.
    Bytes encode() const;
    static Event decode(ByteView bytes);
    ContentHash hash() const;

    std::string describe() const;
};

}  // namespace principia
