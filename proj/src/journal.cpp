#include "principia/journal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>

#include "principia/error.hpp"
#include "transition.hpp"

namespace principia {

// --- Owner ---------------------------------------------------------------------

std::string Owner::str() const {
    std::string_view prefix = kind == Kind::Person ? "person" : kind == Kind::Journal ? "journal" : "escrow";
    return std::string(prefix) + ":" + to_hex(key);
}

Owner Owner::parse(std::string_view text) {
    auto colon = text.find(':');
    require(colon != std::string_view::npos, ErrorCode::Decode, "owner must be kind:hex");
    auto kind_text = text.substr(0, colon);
    auto digest = ContentHash::from_hex(text.substr(colon + 1));
    Owner o;
    o.key = digest.bytes;
    if (kind_text == "person") {
        o.kind = Kind::Person;
    } else if (kind_text == "journal") {
        o.kind = Kind::Journal;
    } else if (kind_text == "escrow") {
        o.kind = Kind::Escrow;
    } else {
        fail(ErrorCode::Decode, "unknown owner kind '" + std::string(kind_text) + "'");
    }
    return o;
}

Owner Owner::decode(Reader& r) {
    Owner o;
    auto k = r.u8();
    require(k <= 2, ErrorCode::Decode, "unknown owner kind byte");
    o.kind = static_cast<Kind>(k);
    auto raw = r.raw(32);
    std::copy(raw.begin(), raw.end(), o.key.begin());
    return o;
}

// --- parameters ----------------------------------------------------------------

void JournalParams::validate() const {
    auto in_open_unit = [](Fraction f) { return f.ppm > 0 && f.ppm <= kMicroPerUnit; };
    require(keep_fraction.ppm <= kMicroPerUnit, ErrorCode::BadParams, "keep fraction above 1");
    require(max_review_days > 0, ErrorCode::BadParams, "max review time must be positive");
    require(reviewers_per_paper >= 1, ErrorCode::BadParams, "need at least one reviewer per paper");
    require(in_open_unit(review_quorum), ErrorCode::BadParams, "review quorum outside (0,1]");
    require(in_open_unit(spend_quorum), ErrorCode::BadParams, "spend quorum outside (0,1]");
    require(in_open_unit(modify_quorum), ErrorCode::BadParams, "modify quorum outside (0,1]");
    require(modify_quorum > spend_quorum, ErrorCode::BadParams,
            "modify quorum must be higher than spend quorum");
}

void JournalParams::encode(Writer& w) const {
    w.u32(keep_fraction.ppm)
        .boolean(anonymous_reviewers)
        .u32(max_review_days)
        .u32(reviewers_per_paper)
        .u32(review_quorum.ppm)
        .u32(spend_quorum.ppm)
        .u32(modify_quorum.ppm);
}

JournalParams JournalParams::decode(Reader& r) {
    JournalParams p;
    p.keep_fraction.ppm = r.u32();
    p.anonymous_reviewers = r.boolean();
    p.max_review_days = r.u32();
    p.reviewers_per_paper = r.u32();
    p.review_quorum.ppm = r.u32();
    p.spend_quorum.ppm = r.u32();
    p.modify_quorum.ppm = r.u32();
    return p;
}

JournalParams JournalParams::parse(std::string_view text) { return parse(text, JournalParams{}); }

JournalParams JournalParams::parse(std::string_view text, const JournalParams& base) {
    JournalParams p = base;
    std::string item;
    std::istringstream items{std::string(text)};
    while (std::getline(items, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        require(eq != std::string::npos, ErrorCode::BadParams, "expected key=value in '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        auto as_uint = [&]() -> std::uint32_t {
            try {
                std::size_t used = 0;
                unsigned long v = std::stoul(value, &used);
                if (used == value.size()) return static_cast<std::uint32_t>(v);
            } catch (const std::exception&) {
            }
            fail(ErrorCode::BadParams, "invalid integer for " + key + ": '" + value + "'");
        };
        if (key == "f") {
            p.keep_fraction = Fraction::parse(value);
        } else if (key == "a") {
            require(value == "0" || value == "1" || value == "true" || value == "false",
                    ErrorCode::BadParams, "a must be 0/1");
            p.anonymous_reviewers = value == "1" || value == "true";
        } else if (key == "t") {
            p.max_review_days = as_uint();
        } else if (key == "n") {
            p.reviewers_per_paper = as_uint();
        } else if (key == "r") {
            p.review_quorum = Fraction::parse(value);
        } else if (key == "p") {
            p.spend_quorum = Fraction::parse(value);
        } else if (key == "m") {
            p.modify_quorum = Fraction::parse(value);
        } else {
            fail(ErrorCode::BadParams, "unknown journal parameter '" + key + "'");
        }
    }
    return p;
}

std::string JournalParams::str() const {
    return fmt::format("f={},a={},t={},n={},r={},p={},m={}", keep_fraction.str(),
                       anonymous_reviewers ? 1 : 0, max_review_days, reviewers_per_paper,
                       review_quorum.str(), spend_quorum.str(), modify_quorum.str());
}

// --- journal snapshots -------------------------------------------------------------

bool Journal::is_member(const PersonId& p) const {
    return std::binary_search(board.begin(), board.end(), p);
}

Journal Journal::make(std::string title, std::set<PersonId> board, JournalParams params,
                      std::optional<JournalId> ancestor, Day created_at) {
    Journal j;
    j.title = std::move(title);
    j.board.assign(board.begin(), board.end());
    j.ancestor = ancestor;
    j.params = params;
    j.created_at = created_at;

    Writer w;
    w.str("principia.journal").str(j.title);
    w.list(j.board, [](Writer& w, const PersonId& p) { w.digest(p); });
    j.params.encode(w);
    w.boolean(ancestor.has_value());
    if (ancestor) w.digest(*ancestor);
    j.id = JournalId::from(content_hash(w.bytes()));
    return j;
}

void Journal::encode(Writer& w) const {
    w.digest(id).str(title);
    w.list(board, [](Writer& w, const PersonId& p) { w.digest(p); });
    w.boolean(ancestor.has_value());
    if (ancestor) w.digest(*ancestor);
    params.encode(w);
    w.i64(created_at);
}

// --- changes -------------------------------------------------------------------

void encode_change(Writer& w, const JournalChange& c) {
    w.u8(static_cast<std::uint8_t>(c.index()));
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ParamChange>) {
                v.params.encode(w);
            } else {
                w.digest(v.person);
            }
        },
        c);
}

JournalChange decode_change(Reader& r) {
    switch (r.u8()) {
        case 0: return BoardAdd{r.digest<PersonIdTag>()};
        case 1: return BoardRemove{r.digest<PersonIdTag>()};
        case 2: return ParamChange{JournalParams::decode(r)};
        default: fail(ErrorCode::Decode, "unknown journal change tag");
    }
}

std::string describe_change(const JournalChange& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BoardAdd>) {
                return "add:" + v.person.hex();
            } else if constexpr (std::is_same_v<T, BoardRemove>) {
                return "remove:" + v.person.hex();
            } else {
                return "params:" + v.params.str();
            }
        },
        c);
}

Journal apply_change(const Journal& journal, const JournalChange& change, Day day) {
    std::set<PersonId> board(journal.board.begin(), journal.board.end());
    JournalParams params = journal.params;
    if (const auto* add = std::get_if<BoardAdd>(&change)) {
        require(!board.contains(add->person), ErrorCode::AlreadyMember,
                add->person.short_hex() + " is already on the board");
        board.insert(add->person);
    } else if (const auto* rm = std::get_if<BoardRemove>(&change)) {
        require(board.contains(rm->person), ErrorCode::NotMember,
                rm->person.short_hex() + " is not on the board");
        board.erase(rm->person);
        require(!board.empty(), ErrorCode::EmptyBoardResult, "change would leave the board empty");
    } else {
        params = std::get<ParamChange>(change).params;
        params.validate();
    }
    return Journal::make(journal.title, std::move(board), params, journal.id, day);
}

bool is_self_removal(const JournalChange& change, const PersonId& actor) {
    const auto* rm = std::get_if<BoardRemove>(&change);
    return rm != nullptr && rm->person == actor;
}

// --- proposals -------------------------------------------------------------------

Bytes create_proposal(std::string_view title, const std::set<PersonId>& founders,
                      const JournalParams& params) {
    Writer w;
    w.str("principia.proposal.create").str(title);
    w.collection(founders, [](Writer& w, const PersonId& p) { w.digest(p); });
    params.encode(w);
    return w.take();
}

Bytes modify_proposal(const JournalId& journal, const JournalChange& change) {
    Writer w;
    w.str("principia.proposal.modify").digest(journal);
    encode_change(w, change);
    return w.take();
}

Bytes join_proposal(const JournalId& journal, const PersonId& candidate, Micro bid,
                    std::uint64_t bid_seq) {
    Writer w;
    w.str("principia.proposal.join").digest(journal).digest(candidate).i64(bid).u64(bid_seq);
    return w.take();
}

Bytes spend_proposal(const JournalId& journal, Micro amount, const Owner& recipient,
                     std::uint64_t nonce) {
    Writer w;
    w.str("principia.proposal.spend").digest(journal).i64(amount);
    recipient.encode(w);
    w.u64(nonce);
    return w.take();
}

Bytes transfer_proposal(const JournalId& ancestor, const JournalId& descendant) {
    Writer w;
    w.str("principia.proposal.transfer").digest(ancestor).digest(descendant);
    return w.take();
}

QuorumCheck tally_approvals(const KeyRegistry& keys, std::span<const PersonId> board, Fraction quorum,
                            std::span<const Signature> approvals, ByteView payload) {
    QuorumCheck check;
    check.required = required_approvals(quorum, board.size());
    for (const Signature& sig : approvals) {
        if (!std::binary_search(board.begin(), board.end(), sig.signer)) {
            continue;
        }
        require(keys.verify(payload, sig), ErrorCode::BadSignature,
                "invalid approval from " + sig.signer.short_hex());
        check.got.insert(sig.signer);
    }
    return check;
}

// --- ledger transitions -------------------------------------------------------------

namespace {

void require_quorum(const QuorumCheck& q, std::string_view what) {
    require(q.met(), ErrorCode::QuorumNotMet,
            fmt::format("{}: {} of {} required approvals", what, q.got.size(), q.required));
}

bool join_expired(const Transition& t, const PendingJoin& pj) {
    return t.now() > pj.bid_day + t.s.config().join_expiry_days;
}

}  // namespace

void apply_body(Transition& t, const JournalCreate& b) {
    require(!b.founders.empty(), ErrorCode::EmptyBoardResult, "a journal needs at least one founder");
    b.params.validate();
    const Bytes payload = create_proposal(b.title, b.founders, b.params);
    std::set<PersonId> signed_by;
    for (const Signature& sig : b.signatures) {
        require(t.keys().verify(payload, sig), ErrorCode::BadSignature,
                "invalid founder signature from " + sig.signer.short_hex());
        signed_by.insert(sig.signer);
    }
    for (const PersonId& f : b.founders) {
        require(t.keys().contains(f), ErrorCode::UnknownEntity, "founder " + f.short_hex() + " not registered");
        require(signed_by.contains(f), ErrorCode::MissingFounderSignature,
                "founder " + f.short_hex() + " did not sign");
    }
    Journal j = Journal::make(b.title, b.founders, b.params, std::nullopt, t.now());
    require(!t.journals().contains(j.id), ErrorCode::PreconditionFailed, "journal already exists");

    JournalRecord rec;
    rec.journal = std::move(j);
    t.journals().emplace(rec.journal.id, std::move(rec));
}

void apply_body(Transition& t, const JournalModify& b) {
    JournalRecord& rec = t.journal(b.journal);
    require(rec.live(), ErrorCode::AlreadySuperseded, "journal already has a descendant");
    require(!rec.pending_join || join_expired(t, *rec.pending_join), ErrorCode::PendingProposal,
            "a join vote is pending on this journal");
    Journal next = apply_change(rec.journal, b.change, t.now());
    if (!is_self_removal(b.change, t.actor())) {
        auto q = tally_approvals(t.keys(), rec.journal.board, rec.journal.params.modify_quorum,
                                 b.approvals, modify_proposal(b.journal, b.change));
        require_quorum(q, "modify");
    }
    require(!t.journals().contains(next.id), ErrorCode::PreconditionFailed, "successor already exists");

    rec.descendant = next.id;
    rec.superseded_at = t.now();
    JournalRecord succ;
    succ.journal = std::move(next);
    t.journals().emplace(succ.journal.id, std::move(succ));
}

void apply_body(Transition& t, const JoinBid& b) {
    JournalRecord& rec = t.journal(b.journal);
    require(rec.live(), ErrorCode::AlreadySuperseded, "cannot join a superseded journal");
    require(!rec.pending_join, ErrorCode::PendingProposal, "another join vote is pending");
    require(!rec.journal.is_member(t.actor()), ErrorCode::AlreadyMember, "already on the board");
    PendingJoin pj{t.actor(), b.bid, t.seq(), t.now()};
    t.require_funds(Owner::person(t.actor()), b.bid);

    t.move(Owner::person(t.actor()), pj.escrow(b.journal), b.bid);
    rec.pending_join = pj;
}

void apply_body(Transition& t, const JoinDecision& b) {
    JournalRecord& rec = t.journal(b.journal);
    require(rec.pending_join.has_value(), ErrorCode::PreconditionFailed, "no pending join on this journal");
    const PendingJoin pj = *rec.pending_join;
    require(rec.journal.is_member(t.actor()) || t.actor() == pj.candidate, ErrorCode::NotMember,
            "only board members or the candidate may close a join vote");

    bool accepted = false;
    if (rec.live() && !join_expired(t, pj)) {
        auto q = tally_approvals(t.keys(), rec.journal.board, rec.journal.params.modify_quorum,
                                 b.approvals, join_proposal(b.journal, pj.candidate, pj.bid, pj.bid_seq));
        accepted = q.met();
    }

    if (!accepted) {
        t.move(pj.escrow(b.journal), Owner::person(pj.candidate), pj.bid);
        rec.pending_join.reset();
        return;
    }
    Journal next = apply_change(rec.journal, BoardAdd{pj.candidate}, t.now());
    require(!t.journals().contains(next.id), ErrorCode::PreconditionFailed, "successor already exists");

    t.move(pj.escrow(b.journal), Owner::journal(next.id), pj.bid);
    rec.pending_join.reset();
    rec.descendant = next.id;
    rec.superseded_at = t.now();
    JournalRecord succ;
    succ.journal = std::move(next);
    t.journals().emplace(succ.journal.id, std::move(succ));
}

void apply_body(Transition& t, const BalanceSpend& b) {
    JournalRecord& rec = t.journal(b.journal);
    const Bytes payload = spend_proposal(b.journal, b.amount, b.recipient, b.nonce);
    auto q = tally_approvals(t.keys(), rec.journal.board, rec.journal.params.spend_quorum, b.approvals,
                             payload);
    require_quorum(q, "spend");
    require(!t.consumed(payload), ErrorCode::PreconditionFailed, "spend proposal already executed");
    switch (b.recipient.kind) {
        case Owner::Kind::Person:
            require(t.keys().contains(PersonId{b.recipient.key}), ErrorCode::UnknownEntity,
                    "recipient not registered");
            break;
        case Owner::Kind::Journal:
            require(t.journals().contains(JournalId{b.recipient.key}), ErrorCode::UnknownEntity,
                    "recipient journal unknown");
            break;
        case Owner::Kind::Escrow:
            fail(ErrorCode::PreconditionFailed, "cannot spend into an escrow slot");
    }
    t.require_funds(Owner::journal(b.journal), b.amount);

    t.move(Owner::journal(b.journal), b.recipient, b.amount);
    t.consume(payload);
}

void apply_body(Transition& t, const BalanceTransfer& b) {
    JournalRecord& anc = t.journal(b.ancestor);
    JournalRecord& desc = t.journal(b.descendant);
    require(desc.journal.ancestor == b.ancestor, ErrorCode::NotDescendant,
            "journal " + b.descendant.short_hex() + " does not descend from " + b.ancestor.short_hex());
    auto q = tally_approvals(t.keys(), anc.journal.board, anc.journal.params.spend_quorum, b.approvals,
                             transfer_proposal(b.ancestor, b.descendant));
    require_quorum(q, "transfer");

    t.move(Owner::journal(b.ancestor), Owner::journal(b.descendant),
           t.s.balance(Owner::journal(b.ancestor)));
}

}  // namespace principia
