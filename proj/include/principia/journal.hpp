#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "principia/canonical.hpp"
#include "principia/identity.hpp"
#include "principia/money.hpp"
#include "principia/quorum.hpp"
#include "principia/wallet.hpp"

namespace principia {

struct JournalParams {
    Fraction keep_fraction;              // share of each review fee kept by the journal
    bool anonymous_reviewers = false;
    std::uint32_t max_review_days = 30;
    std::uint32_t reviewers_per_paper = 3;
    Fraction review_quorum{500'000};     // to accept a paper for review
    Fraction spend_quorum{500'000};      // to spend the wallet
    Fraction modify_quorum{660'000};     // to modify the journal; must exceed spend_quorum

    bool operator==(const JournalParams&) const = default;

    /// Throws Error(BadParams).
    void validate() const;

    void encode(Writer& w) const;
    static JournalParams decode(Reader& r);

    /// `f=0.2,a=0,t=30,n=3,r=0.5,p=0.5,m=0.66`; omitted keys keep `base` values.
    static JournalParams parse(std::string_view text, const JournalParams& base);
    static JournalParams parse(std::string_view text);
    std::string str() const;
};

/// Immutable journal snapshot. Any change produces a new snapshot whose
/// ancestor is this one.
struct Journal {
    JournalId id;
    std::string title;
    std::vector<PersonId> board;  // sorted, unique, nonempty
    std::optional<JournalId> ancestor;
    JournalParams params;
    Day created_at = 0;

    bool is_member(const PersonId& p) const;

    /// Builds a snapshot and derives its id from (title, board, params, ancestor).
    static Journal make(std::string title, std::set<PersonId> board, JournalParams params,
                        std::optional<JournalId> ancestor, Day created_at);

    void encode(Writer& w) const;
    static Journal decode(Reader& r);
};

struct BoardAdd {
    PersonId person;
    bool operator==(const BoardAdd&) const = default;
};
struct BoardRemove {
    PersonId person;
    bool operator==(const BoardRemove&) const = default;
};
struct ParamChange {
    JournalParams params;
    bool operator==(const ParamChange&) const = default;
};
using JournalChange = std::variant<BoardAdd, BoardRemove, ParamChange>;

void encode_change(Writer& w, const JournalChange& c);
JournalChange decode_change(Reader& r);
std::string describe_change(const JournalChange& c);

/// The successor snapshot after `change`. Throws AlreadyMember, NotMember,
/// EmptyBoardResult or BadParams.
Journal apply_change(const Journal& journal, const JournalChange& change, Day day);

/// A member removing themself needs no approvals.
bool is_self_removal(const JournalChange& change, const PersonId& actor);

// Byte strings that board members sign to approve each kind of proposal.
Bytes create_proposal(std::string_view title, const std::set<PersonId>& founders,
                      const JournalParams& params);
Bytes modify_proposal(const JournalId& journal, const JournalChange& change);
Bytes join_proposal(const JournalId& journal, const PersonId& candidate, Micro bid,
                    std::uint64_t bid_seq);
Bytes spend_proposal(const JournalId& journal, Micro amount, const Owner& recipient,
                     std::uint64_t nonce);
Bytes transfer_proposal(const JournalId& ancestor, const JournalId& descendant);

/// Counts distinct board members holding a valid approval over `payload`.
/// Signatures from non-members are ignored; a member signature that fails to
/// verify is an error (BadSignature).
QuorumCheck tally_approvals(const KeyRegistry& keys, std::span<const PersonId> board, Fraction quorum,
                            std::span<const Signature> approvals, ByteView payload);

}  // namespace principia
