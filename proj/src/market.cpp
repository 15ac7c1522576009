#include "principia/market.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "principia/error.hpp"
#include "transition.hpp"

namespace principia {

std::string_view status_name(SubmissionStatus s) noexcept {
    switch (s) {
        case SubmissionStatus::Submitted: return "submitted";
        case SubmissionStatus::Matched: return "matched";
        case SubmissionStatus::Scored: return "scored";
        case SubmissionStatus::ReportScored: return "report-scored";
        case SubmissionStatus::Settled: return "settled";
        case SubmissionStatus::Withdrawn: return "withdrawn";
    }
    return "unknown";
}

std::int64_t FieldThresholds::for_keywords(const std::set<std::string>& keywords) const {
    std::optional<std::int64_t> best;
    for (const auto& k : keywords) {
        if (auto it = by_field.find(k); it != by_field.end()) {
            best = std::max(best.value_or(it->second), it->second);
        }
    }
    return best.value_or(default_points);
}

void FieldThresholds::validate() const {
    auto check = [](std::int64_t v, std::string_view what) {
        require(v >= 1 * kMicroPerUnit && v <= 5 * kMicroPerUnit, ErrorCode::BadParams,
                fmt::format("threshold for {} must lie in [1, 5]", what));
    };
    check(default_points, "default");
    for (const auto& [field, v] : by_field) check(v, field);
}

void ScientistProfile::encode(Writer& w) const {
    w.digest(person);
    w.collection(keywords, [](Writer& w, const std::string& k) { w.str(k); });
    w.i64(rs).i64(ask).u32(capacity).u32(active).u32(completed);
}

bool MarketSubmission::is_reviewer(const PersonId& p) const {
    return std::find(reviewers.begin(), reviewers.end(), p) != reviewers.end();
}

void MarketSubmission::encode(Writer& w) const {
    w.digest(id).digest(paper).digest(submitter);
    w.collection(keywords, [](Writer& w, const std::string& k) { w.str(k); });
    w.i64(bid).u8(static_cast<std::uint8_t>(status)).u64(created_seq);
    w.list(reviewers, [](Writer& w, const PersonId& p) { w.digest(p); });
    w.collection(asks, [](Writer& w, const auto& kv) { w.digest(kv.first).i64(kv.second); });
    w.collection(paper_scores, [](Writer& w, const auto& kv) { w.digest(kv.first).u8(kv.second); });
    w.collection(reports, [](Writer& w, const auto& kv) { w.digest(kv.first).digest(kv.second); });
    w.collection(report_scores, [](Writer& w, const auto& kv) {
        w.digest(kv.first.first).digest(kv.first.second).u8(kv.second);
    });
    w.collection(report_scorers, [](Writer& w, const PersonId& p) { w.digest(p); });
    w.collection(paid, [](Writer& w, const auto& kv) { w.digest(kv.first).i64(kv.second); });
    w.i64(refunded).boolean(accepted);
}

SubmissionId make_submission_id(const ContentHash& paper, std::uint64_t seq) {
    Writer w;
    w.str("principia.submission").digest(paper).u64(seq);
    return SubmissionId::from(content_hash(w.bytes()));
}

bool is_mixed(std::span<const RsPoints> chosen_rs, std::span<const RsPoints> pool_rs) {
    if (chosen_rs.empty() || pool_rs.empty()) return false;
    auto [lo, hi] = std::minmax_element(chosen_rs.begin(), chosen_rs.end());
    const __int128 spread = static_cast<__int128>(*hi) - *lo;
    const __int128 n = static_cast<__int128>(pool_rs.size());
    __int128 sum = 0;
    __int128 sum_sq = 0;
    for (RsPoints x : pool_rs) {
        sum += x;
        sum_sq += static_cast<__int128>(x) * x;
    }
    // spread >= sqrt(var) with var = (n*sum_sq - sum^2) / n^2
    return spread * spread * n * n >= n * sum_sq - sum * sum;
}

namespace {

struct Search {
    std::vector<Candidate> order;  // RS descending, then id ascending
    std::vector<Micro> suffix_min_ask;
    Micro budget = 0;
    std::size_t n = 0;
    bool want_mixed = false;
    std::vector<RsPoints> pool_rs;

    std::vector<std::size_t> picked;
    std::optional<std::vector<PersonId>> best;
    __int128 best_rs = -1;

    // Upper bound on the RS still attainable from position i with k picks left.
    __int128 bound(std::size_t i, std::size_t k) const {
        __int128 b = 0;
        for (std::size_t j = i; j < i + k && j < order.size(); ++j) b += order[j].rs;
        return b;
    }

    void offer(__int128 rs) {
        if (want_mixed) {
            std::vector<RsPoints> chosen;
            for (std::size_t i : picked) chosen.push_back(order[i].rs);
            if (!is_mixed(chosen, pool_rs)) return;
        }
        std::vector<PersonId> ids;
        for (std::size_t i : picked) ids.push_back(order[i].id);
        std::sort(ids.begin(), ids.end());
        if (rs > best_rs || (rs == best_rs && ids < *best)) {
            best_rs = rs;
            best = std::move(ids);
        }
    }

    void dfs(std::size_t i, Micro spent, __int128 rs) {
        const std::size_t left = n - picked.size();
        if (left == 0) {
            offer(rs);
            return;
        }
        if (order.size() - i < left) return;
        if (best && rs + bound(i, left) < best_rs) return;
        if (spent + static_cast<__int128>(left) * suffix_min_ask[i] > budget) return;
        for (std::size_t j = i; j + left <= order.size(); ++j) {
            if (best && rs + bound(j, left) < best_rs) break;  // bounds only shrink further on
            if (spent + order[j].ask > budget) continue;
            picked.push_back(j);
            dfs(j + 1, spent + order[j].ask, rs + order[j].rs);
            picked.pop_back();
        }
    }
};

}  // namespace

std::optional<std::vector<PersonId>> match_reviewers(std::span<const Candidate> pool, Micro budget,
                                                      std::size_t n) {
    if (n == 0 || pool.size() < n || budget < 0) return std::nullopt;
    Search s;
    s.order.assign(pool.begin(), pool.end());
    std::sort(s.order.begin(), s.order.end(), [](const Candidate& a, const Candidate& b) {
        return a.rs != b.rs ? a.rs > b.rs : a.id < b.id;
    });
    s.suffix_min_ask.assign(s.order.size() + 1, std::numeric_limits<Micro>::max() / 4);
    for (std::size_t i = s.order.size(); i-- > 0;) {
        s.suffix_min_ask[i] = std::min(s.suffix_min_ask[i + 1], s.order[i].ask);
    }
    for (const Candidate& c : pool) s.pool_rs.push_back(c.rs);
    s.budget = budget;
    s.n = n;

    s.want_mixed = true;
    s.dfs(0, 0, 0);
    if (!s.best) {
        s.want_mixed = false;
        s.dfs(0, 0, 0);
    }
    return s.best;
}

Micro suggest_fair_bid(std::span<const Micro> eligible_asks) {
    require(eligible_asks.size() >= kMinMarketReviewers, ErrorCode::NotEnoughReviewers,
            fmt::format("{} eligible reviewers, at least {} needed", eligible_asks.size(), kMinMarketReviewers));
    std::vector<Micro> asks(eligible_asks.begin(), eligible_asks.end());
    std::partial_sort(asks.begin(), asks.begin() + kMinMarketReviewers, asks.end());
    const __int128 sum = static_cast<__int128>(asks[0]) + asks[1] + asks[2];
    return static_cast<Micro>((sum * 11 + 9) / 10);
}

RsPoints mean_points(int sum, int count) {
    if (count <= 0) return 0;
    const std::int64_t num = 2 * static_cast<std::int64_t>(sum) * kMicroPerUnit + count;
    return num / (2 * static_cast<std::int64_t>(count));
}

SettlementResult settle_submission(const MarketSubmission& submission,
                                   const std::map<PersonId, RsPoints>& rs_before,
                                   const SettlementRules& rules) {
    SettlementResult out;
    Micro paid_total = 0;
    for (const PersonId& r : submission.reviewers) {
        ReviewerSettlement rs;
        rs.reviewer = r;
        rs.ask = submission.asks.at(r);
        for (const auto& [key, score] : submission.report_scores) {
            if (key.second == r) {
                rs.report_score_sum += score;
                ++rs.report_score_count;
            }
        }
        rs.paid = rs.report_score_count > 0 &&
                  static_cast<std::int64_t>(rs.report_score_sum) * kMicroPerUnit >=
                      rules.report_threshold * rs.report_score_count;
        if (rs.paid) paid_total += rs.ask;

        rs.rs_before = rs_before.at(r);
        rs.rs_after = rs.rs_before;
        if (rs.report_score_count > 0) {
            const RsPoints mean = mean_points(rs.report_score_sum, rs.report_score_count);
            if (rules.rs_update == RsUpdate::Additive) {
                rs.rs_after = rs.rs_before + mean;
            } else {
                const __int128 w = rules.ema_weight.ppm;
                rs.rs_after = static_cast<RsPoints>(
                    (static_cast<__int128>(rs.rs_before) * (kMicroPerUnit - w) + mean * w) / kMicroPerUnit);
            }
        }
        out.reviewers.push_back(rs);
    }
    out.refund_to_authors = submission.bid - paid_total;
    for (const auto& [who, s] : submission.paper_scores) {
        out.paper_score_sum += s;
        ++out.paper_score_count;
    }
    out.accepted = out.paper_score_count > 0 &&
                   static_cast<std::int64_t>(out.paper_score_sum) * kMicroPerUnit >
                       rules.acceptance_threshold * out.paper_score_count;
    return out;
}

// --- ledger transitions -------------------------------------------------------------

namespace {

void require_status(const MarketSubmission& s, SubmissionStatus expected) {
    require(s.status == expected, ErrorCode::WrongStatus,
            fmt::format("submission is {}, expected {}", status_name(s.status), status_name(expected)));
}

void check_score(int score) {
    require(score >= 1 && score <= 5, ErrorCode::ScoreOutOfRange, fmt::format("score {} outside 1..5", score));
}

}  // namespace

void apply_body(Transition& t, const MarketAsk& b) {
    require(b.fee >= 0, ErrorCode::PreconditionFailed, "negative ask");
    for (const auto& k : b.keywords) require(!k.empty(), ErrorCode::PreconditionFailed, "empty keyword");
    auto it = t.profiles().find(t.actor());
    require(it == t.profiles().end() || b.capacity >= it->second.active, ErrorCode::PreconditionFailed,
            "capacity below the reviews already in progress");
    if (it == t.profiles().end()) {
        ScientistProfile p;
        p.person = t.actor();
        p.rs = t.s.config().initial_rs;
        it = t.profiles().emplace(t.actor(), std::move(p)).first;
    }
    it->second.keywords = b.keywords;
    it->second.ask = b.fee;
    it->second.capacity = b.capacity;
}

void apply_body(Transition& t, const MarketSubmit& b) {
    PaperRecord& paper = t.paper(b.paper);
    require(paper.authors.contains(t.actor()), ErrorCode::PreconditionFailed, "only an author may submit");
    if (paper.market_submission) {
        const MarketSubmission& prev = t.submission(*paper.market_submission);
        require(prev.status == SubmissionStatus::Withdrawn, ErrorCode::PreconditionFailed,
                prev.status == SubmissionStatus::Settled ? "paper already accepted by the market"
                                                         : "paper already has an open submission");
    }
    require(b.bid >= 0, ErrorCode::PreconditionFailed, "negative bid");
    const std::set<std::string>& keywords = b.keywords.empty() ? paper.keywords : b.keywords;
    require(!keywords.empty(), ErrorCode::PreconditionFailed, "submission needs keywords");
    t.require_funds(Owner::person(t.actor()), b.bid);

    MarketSubmission sub;
    sub.id = make_submission_id(b.paper, t.seq());
    require(!t.submissions().contains(sub.id), ErrorCode::PreconditionFailed, "submission exists");
    sub.paper = b.paper;
    sub.submitter = t.actor();
    sub.keywords = keywords;
    sub.bid = b.bid;
    sub.created_seq = t.seq();

    t.move(Owner::person(t.actor()), Owner::escrow(sub.id), b.bid);
    paper.market_submission = sub.id;
    t.submissions().emplace(sub.id, std::move(sub));
}

void apply_body(Transition& t, const MarketMatch& b) {
    MarketSubmission& sub = t.submission(b.submission);
    require_status(sub, SubmissionStatus::Submitted);
    const PaperRecord& paper = t.paper(sub.paper);
    auto pool = t.s.eligible_candidates(sub.keywords, paper.authors);
    auto chosen = match_reviewers(pool, sub.bid, t.s.config().reviewers_per_submission);
    require(chosen.has_value(), ErrorCode::NoFeasibleMatch,
            fmt::format("no {} eligible reviewers fit a bid of {}", t.s.config().reviewers_per_submission,
                        format_credits(sub.bid)));
    std::vector<PersonId> proposed = b.reviewers;
    std::sort(proposed.begin(), proposed.end());
    require(proposed == *chosen, ErrorCode::PreconditionFailed, "reviewers differ from the protocol's match");

    sub.reviewers = *chosen;
    for (const PersonId& r : sub.reviewers) {
        ScientistProfile& p = t.profiles().at(r);
        sub.asks[r] = p.ask;
        ++p.active;
    }
    sub.status = SubmissionStatus::Matched;
}

void apply_body(Transition& t, const MarketReview& b) {
    MarketSubmission& sub = t.submission(b.submission);
    require_status(sub, SubmissionStatus::Matched);
    require(sub.is_reviewer(t.actor()), ErrorCode::NotMatched, "not matched to this submission");
    require(!sub.paper_scores.contains(t.actor()), ErrorCode::Duplicate, "paper already scored");
    check_score(b.score);

    sub.paper_scores[t.actor()] = b.score;
    sub.reports[t.actor()] = b.report;
    if (sub.paper_scores.size() == sub.reviewers.size()) sub.status = SubmissionStatus::Scored;
}

void apply_body(Transition& t, const MarketReportScore& b) {
    MarketSubmission& sub = t.submission(b.submission);
    require_status(sub, SubmissionStatus::Scored);
    require(sub.is_reviewer(t.actor()), ErrorCode::NotMatched, "not matched to this submission");
    require(!sub.report_scorers.contains(t.actor()), ErrorCode::Duplicate, "reports already scored");
    std::set<PersonId> seen;
    for (const auto& [scoree, score] : b.scores) {
        require(scoree != t.actor(), ErrorCode::SelfScore, "a reviewer cannot score their own report");
        require(sub.is_reviewer(scoree), ErrorCode::NotMatched, scoree.short_hex() + " is not a reviewer here");
        require(seen.insert(scoree).second, ErrorCode::Duplicate, "report scored twice");
        check_score(score);
    }
    require(seen.size() + 1 == sub.reviewers.size(), ErrorCode::PreconditionFailed,
            "every other reviewer's report must be scored");

    for (const auto& [scoree, score] : b.scores) sub.report_scores[{t.actor(), scoree}] = score;
    sub.report_scorers.insert(t.actor());
    if (sub.report_scorers.size() == sub.reviewers.size()) sub.status = SubmissionStatus::ReportScored;
}

void apply_body(Transition& t, const MarketSettlement& b) {
    MarketSubmission& sub = t.submission(b.submission);
    require_status(sub, SubmissionStatus::ReportScored);
    std::map<PersonId, RsPoints> rs;
    for (const PersonId& r : sub.reviewers) rs[r] = t.profiles().at(r).rs;
    SettlementRules rules = t.s.config().settlement_rules();
    rules.acceptance_threshold = t.s.config().thresholds.for_keywords(sub.keywords);
    SettlementResult result = settle_submission(sub, rs, rules);

    for (const ReviewerSettlement& r : result.reviewers) {
        if (r.paid) {
            t.move(Owner::escrow(sub.id), Owner::person(r.reviewer), r.ask);
            sub.paid[r.reviewer] = r.ask;
        }
        ScientistProfile& p = t.profiles().at(r.reviewer);
        p.rs = r.rs_after;
        --p.active;
        ++p.completed;
    }
    t.move(Owner::escrow(sub.id), Owner::person(sub.submitter), result.refund_to_authors);
    sub.refunded = result.refund_to_authors;
    sub.accepted = result.accepted;
    sub.status = result.accepted ? SubmissionStatus::Settled : SubmissionStatus::Withdrawn;
}

}  // namespace principia
