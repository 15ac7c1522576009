#include "principia/state.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "principia/error.hpp"
#include "transition.hpp"

namespace principia {

// --- config ---------------------------------------------------------------------------

void ProtocolConfig::validate() const {
    require(join_expiry_days > 0, ErrorCode::Config, "join expiry must be positive");
    require(report_threshold >= kMicroPerUnit && report_threshold <= 5 * kMicroPerUnit, ErrorCode::Config,
            "report threshold must lie in [1, 5]");
    require(initial_rs >= 0, ErrorCode::Config, "initial RS must be non-negative");
    require(ema_weight.ppm <= kMicroPerUnit, ErrorCode::Config, "EMA weight must lie in [0, 1]");
    require(reviewers_per_submission >= kMinMarketReviewers, ErrorCode::Config,
            fmt::format("a market submission needs at least {} reviewers", kMinMarketReviewers));
    thresholds.validate();
}

void ProtocolConfig::encode(Writer& w) const {
    w.i64(join_expiry_days).i64(report_threshold).i64(initial_rs);
    w.u8(static_cast<std::uint8_t>(rs_update)).u32(ema_weight.ppm);
    w.i64(thresholds.default_points);
    w.collection(thresholds.by_field, [](Writer& w, const auto& kv) { w.str(kv.first).i64(kv.second); });
    w.u32(reviewers_per_submission);
}

ProtocolConfig ProtocolConfig::decode(Reader& r) {
    ProtocolConfig c;
    c.join_expiry_days = r.i64();
    c.report_threshold = r.i64();
    c.initial_rs = r.i64();
    const std::uint8_t update = r.u8();
    require(update <= 1, ErrorCode::Decode, "unknown RS update rule");
    c.rs_update = static_cast<RsUpdate>(update);
    c.ema_weight = Fraction{r.u32()};
    c.thresholds.default_points = r.i64();
    for (std::uint32_t n = r.count(); n > 0; --n) {
        std::string field = r.str();
        c.thresholds.by_field[field] = r.i64();
    }
    c.reviewers_per_submission = r.u32();
    c.validate();
    return c;
}

SettlementRules ProtocolConfig::settlement_rules() const {
    SettlementRules rules;
    rules.report_threshold = report_threshold;
    rules.acceptance_threshold = thresholds.default_points;
    rules.rs_update = rs_update;
    rules.ema_weight = ema_weight;
    return rules;
}

Owner PendingJoin::escrow(const JournalId& journal) const {
    Writer w;
    w.str("principia.join").digest(journal).u64(bid_seq);
    return Owner::escrow(content_hash(w.bytes()));
}

// --- transition helpers -----------------------------------------------------------------

JournalRecord& Transition::journal(const JournalId& id) {
    auto it = s.journals_.find(id);
    require(it != s.journals_.end(), ErrorCode::UnknownEntity, "unknown journal " + id.short_hex());
    return it->second;
}

ReviewRound& Transition::round(const RoundId& id) {
    auto it = s.rounds_.find(id);
    require(it != s.rounds_.end(), ErrorCode::UnknownEntity, "unknown review round " + id.short_hex());
    return it->second;
}

MarketSubmission& Transition::submission(const SubmissionId& id) {
    auto it = s.submissions_.find(id);
    require(it != s.submissions_.end(), ErrorCode::UnknownEntity, "unknown submission " + id.short_hex());
    return it->second;
}

PaperRecord& Transition::paper(const ContentHash& id) {
    auto it = s.papers_.find(id);
    require(it != s.papers_.end(), ErrorCode::UnknownEntity, "unknown paper " + id.short_hex());
    return it->second;
}

void Transition::require_funds(const Owner& from, Micro amount) const {
    require(amount >= 0, ErrorCode::PreconditionFailed, "negative amount");
    const Micro have = s.balance(from);
    require(have >= amount, ErrorCode::InsufficientFunds,
            fmt::format("{} holds {}, needs {}", from.str(), format_credits(have), format_credits(amount)));
}

void Transition::move(const Owner& from, const Owner& to, Micro amount) {
    if (amount == 0 || from == to) return;
    auto it = s.wallets_.find(from);
    it->second -= amount;
    if (it->second == 0) s.wallets_.erase(it);
    s.wallets_[to] += amount;
}

void Transition::credit(const Owner& to, Micro amount) {
    if (amount != 0) s.wallets_[to] += amount;
}

bool Transition::consumed(ByteView proposal) const {
    return s.consumed_proposals_.contains(content_hash(proposal));
}

void Transition::consume(ByteView proposal) { s.consumed_proposals_.insert(content_hash(proposal)); }

// --- registry and genesis ----------------------------------------------------------------

namespace {

void apply_body(Transition& t, const KeyRegister& b) {
    require(b.public_key.size() == 32, ErrorCode::InvalidKey, "public keys are 32 bytes");
    const PersonId id = person_id(b.scheme, b.public_key);
    require(!t.keys().contains(id), ErrorCode::Duplicate, "key " + id.short_hex() + " already registered");
    const bool self = id == t.actor();
    // The first key registers itself and becomes the registrar; afterwards a
    // key is added either by its owner (unvalidated) or by the registrar.
    if (!t.registrar()) {
        require(self, ErrorCode::PreconditionFailed, "the first key must register itself");
    } else if (!self) {
        require(t.actor() == *t.registrar(), ErrorCode::PreconditionFailed,
                "only the registrar may register another person's key");
    }
    require(!b.validated || !t.registrar() || t.actor() == *t.registrar(), ErrorCode::PreconditionFailed,
            "only the registrar may mark a key validated");

    t.keys().add(RegisteredKey{b.scheme, b.public_key, b.validated});
    if (!t.registrar()) t.registrar() = id;
}

void apply_body(Transition& t, const Mint& b) {
    require(t.genesis_open(), ErrorCode::PreconditionFailed, "credits can only be minted at genesis");
    require(t.registrar() && t.actor() == *t.registrar(), ErrorCode::PreconditionFailed,
            "only the registrar may mint");
    require(b.amount > 0, ErrorCode::PreconditionFailed, "mint amount must be positive");
    require(t.keys().contains(b.to), ErrorCode::UnknownEntity, "recipient " + b.to.short_hex() + " not registered");
    require(t.minted() <= std::numeric_limits<Micro>::max() - b.amount, ErrorCode::PreconditionFailed,
            "mint overflows the money supply");
    t.credit(Owner::person(b.to), b.amount);
    t.minted() += b.amount;
}

}  // namespace

// --- state ---------------------------------------------------------------------------------

Micro State::balance(const Owner& owner) const {
    auto it = wallets_.find(owner);
    return it == wallets_.end() ? 0 : it->second;
}

Micro State::total_balance() const {
    Micro sum = 0;
    for (const auto& [owner, amount] : wallets_) sum += amount;
    return sum;
}

const JournalRecord& State::journal(const JournalId& id) const {
    auto it = journals_.find(id);
    require(it != journals_.end(), ErrorCode::UnknownEntity, "unknown journal " + id.short_hex());
    return it->second;
}

const ReviewRound& State::round(const RoundId& id) const {
    auto it = rounds_.find(id);
    require(it != rounds_.end(), ErrorCode::UnknownEntity, "unknown review round " + id.short_hex());
    return it->second;
}

const MarketSubmission& State::submission(const SubmissionId& id) const {
    auto it = submissions_.find(id);
    require(it != submissions_.end(), ErrorCode::UnknownEntity, "unknown submission " + id.short_hex());
    return it->second;
}

const PaperRecord& State::paper(const ContentHash& hash) const {
    auto it = papers_.find(hash);
    require(it != papers_.end(), ErrorCode::UnknownEntity, "unknown paper " + hash.short_hex());
    return it->second;
}

std::vector<JournalId> State::lineage(const JournalId& id) const {
    std::vector<JournalId> chain{id};
    for (auto anc = journal(id).journal.ancestor; anc; anc = journal(*anc).journal.ancestor) {
        chain.push_back(*anc);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

std::vector<Candidate> State::eligible_candidates(const std::set<std::string>& keywords,
                                                  const std::set<PersonId>& exclude) const {
    std::vector<Candidate> out;
    for (const auto& [id, p] : profiles_) {
        if (exclude.contains(id) || !p.has_spare_capacity()) continue;
        bool overlap = std::any_of(p.keywords.begin(), p.keywords.end(),
                                   [&](const std::string& k) { return keywords.contains(k); });
        if (overlap) out.push_back(Candidate{id, p.ask, p.rs});
    }
    return out;
}

std::vector<ServiceInterval> State::service_intervals(Day at_day) const {
    std::vector<ServiceInterval> out;
    for (const auto& [id, rec] : journals_) {
        const Day from = rec.journal.created_at;
        if (from > at_day) continue;
        const Day to = std::min(rec.superseded_at.value_or(at_day), at_day);
        for (const PersonId& p : rec.journal.board) out.push_back(ServiceInterval{p, id, from, to});
    }
    return out;
}

ReputationInput State::reputation_input(Day at_day) const {
    ReputationInput in;
    for (const auto& [id, rec] : journals_) {
        if (rec.journal.created_at <= at_day) in.boards[id] = rec.journal.board;
    }
    for (const auto& [hash, p] : papers_) {
        if (p.published_in && p.published_at <= at_day) {
            in.papers.push_back(PublishedPaper{hash, *p.published_in, p.published_at});
        }
        for (const ContentHash& c : p.cites) in.citations.push_back(Citation{hash, c});
    }
    in.intervals = service_intervals(at_day);
    return in;
}

void State::apply(const Event& event) {
    require(event.timestamp >= now_, ErrorCode::PreconditionFailed,
            fmt::format("timestamp day {} is before day {}", event.timestamp, now_));
    Transition t{*this, event};
    std::visit([&](const auto& body) { apply_body(t, body); }, event.body);

    now_ = event.timestamp;
    ++event_count_;
    if (event.kind() != EventKind::KeyRegister && event.kind() != EventKind::Mint) genesis_open_ = false;
}

ContentHash State::digest() const {
    Writer w;
    config_.encode(w);
    w.list(keys_.entries(), [](Writer& w, const auto& kv) {
        w.digest(kv.first).u8(static_cast<std::uint8_t>(kv.second.scheme)).blob(kv.second.public_key);
        w.boolean(kv.second.validated);
    });
    w.boolean(registrar_.has_value());
    if (registrar_) w.digest(*registrar_);
    w.boolean(genesis_open_).i64(minted_).i64(now_).u64(event_count_);
    w.list(wallets_, [](Writer& w, const auto& kv) {
        kv.first.encode(w);
        w.i64(kv.second);
    });
    w.list(journals_, [](Writer& w, const auto& kv) {
        const JournalRecord& r = kv.second;
        r.journal.encode(w);
        w.boolean(r.descendant.has_value());
        if (r.descendant) w.digest(*r.descendant);
        w.boolean(r.superseded_at.has_value());
        if (r.superseded_at) w.i64(*r.superseded_at);
        w.list(r.publications, [](Writer& w, const ContentHash& h) { w.digest(h); });
        w.boolean(r.pending_join.has_value());
        if (r.pending_join) {
            w.digest(r.pending_join->candidate).i64(r.pending_join->bid);
            w.u64(r.pending_join->bid_seq).i64(r.pending_join->bid_day);
        }
    });
    w.list(papers_, [](Writer& w, const auto& kv) {
        const PaperRecord& p = kv.second;
        w.digest(p.hash);
        w.list(p.authors, [](Writer& w, const PersonId& a) { w.digest(a); });
        w.list(p.keywords, [](Writer& w, const std::string& k) { w.str(k); });
        w.list(p.cites, [](Writer& w, const ContentHash& c) { w.digest(c); });
        w.i64(p.registered_at);
        w.boolean(p.published_in.has_value());
        if (p.published_in) w.digest(*p.published_in);
        w.i64(p.published_at);
        w.boolean(p.active_round.has_value());
        if (p.active_round) w.digest(*p.active_round);
        w.boolean(p.market_submission.has_value());
        if (p.market_submission) w.digest(*p.market_submission);
    });
    w.list(rounds_, [](Writer& w, const auto& kv) { kv.second.encode(w); });
    w.list(profiles_, [](Writer& w, const auto& kv) { kv.second.encode(w); });
    w.list(submissions_, [](Writer& w, const auto& kv) { kv.second.encode(w); });
    w.list(consumed_proposals_, [](Writer& w, const ContentHash& h) { w.digest(h); });
    return content_hash(w.bytes());
}

void State::check_invariants() const {
    auto check = [](bool ok, std::string_view what) {
        require(ok, ErrorCode::PreconditionFailed, "invariant violated: " + std::string(what));
    };
    Micro sum = 0;
    for (const auto& [owner, amount] : wallets_) {
        check(amount > 0, "stored balances are positive");
        sum += amount;
    }
    check(sum == minted_, "wallets sum to the minted supply");

    for (const auto& [id, rec] : journals_) {
        const auto& board = rec.journal.board;
        check(!board.empty(), "journal boards are nonempty");
        check(std::adjacent_find(board.begin(), board.end(), std::greater_equal<>()) == board.end(),
              "journal boards are sorted and unique");
        if (rec.pending_join) {
            check(balance(rec.pending_join->escrow(id)) == rec.pending_join->bid, "join escrow holds the bid");
        }
    }
    for (const auto& [id, r] : rounds_) {
        const bool open = r.status != RoundStatus::Settled && r.status != RoundStatus::Failed;
        check(balance(Owner::escrow(id)) == (open ? r.fee : 0), "round escrow holds the fee while open");
        for (const auto& [who, s] : r.scores) {
            check(s >= kMinScore && s <= kMaxScore, "review scores in range");
            check(r.is_reviewer(who), "only assigned reviewers score");
        }
        if (r.payout) check(r.payout->total() == r.fee, "round payouts conserve the fee");
    }
    for (const auto& [id, p] : profiles_) {
        check(p.active <= p.capacity, "active reviews within capacity");
    }
    for (const auto& [id, sub] : submissions_) {
        const bool open = sub.status != SubmissionStatus::Settled && sub.status != SubmissionStatus::Withdrawn;
        check(balance(Owner::escrow(id)) == (open ? sub.bid : 0), "submission escrow holds the bid while open");
        if (sub.status != SubmissionStatus::Submitted) {
            check(sub.reviewers.size() >= kMinMarketReviewers, "at least three market reviewers");
            Micro asks = 0;
            for (const auto& [who, a] : sub.asks) asks += a;
            check(asks <= sub.bid, "matched asks fit the bid");
        }
        for (const auto& [key, s] : sub.report_scores) {
            check(key.first != key.second, "no self report scores");
            check(s >= 1 && s <= 5, "report scores in range");
        }
        for (const auto& [who, s] : sub.paper_scores) check(s >= 1 && s <= 5, "paper scores in range");
    }
}

}  // namespace principia
