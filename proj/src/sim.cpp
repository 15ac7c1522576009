#include "principia/sim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "principia/client.hpp"
#include "principia/error.hpp"
#include "principia/rng.hpp"

namespace principia {

namespace {

// Behaviour constants that are not worth a scenario field.
constexpr double kReviewChancePerDay = 0.4;
constexpr double kReviewNoise = 0.6;
constexpr double kFinalVoteChancePerDay = 0.7;
constexpr double kFinalApprove = 0.9;
constexpr double kMarketReviewChancePerDay = 0.5;
constexpr double kReportQualitySd = 0.7;
constexpr double kReportScoreNoise = 0.4;
constexpr double kJoinApprove = 0.6;
constexpr Day kAskReviewEvery = 7;
constexpr Day kIdleDays = 14;
constexpr Day kSpendEvery = 30;
constexpr Micro kAskFloor = 1000;
constexpr std::size_t kMaxCites = 3;

int clamp_score(double x) {
    return static_cast<int>(std::clamp(std::lround(x), long{kMinScore}, long{kMaxScore}));
}

struct Agent {
    const AgentSpec* spec = nullptr;
    KeyPair key;
    PersonId id;
    bool exited = false;
    Day last_busy = 0;
};

class Engine {
public:
    Engine(const Scenario& sc, const RunOptions& opt)
        : sc_(sc),
          opt_(opt),
          check_(opt.check_invariants || sc.check_invariants),
          result_{Ledger(sc.config), {}, 0, {}},
          registrar_(keygen_from_label("registrar", sc.scheme)) {
        for (const AgentSpec& spec : sc.agents) {
            Agent a;
            a.spec = &spec;
            a.key = keygen_from_label("agent:" + spec.name, sc.scheme);
            a.id = a.key.id();
            agents_.push_back(std::move(a));
        }
        std::sort(agents_.begin(), agents_.end(), [](const Agent& x, const Agent& y) { return x.id < y.id; });
        for (std::size_t i = 0; i < agents_.size(); ++i) index_[agents_[i].id] = i;
    }

    RunResult run() {
        std::uint64_t window_start = 0;
        for (today_ = 0; today_ < sc_.horizon_days; ++today_) {
            rngs_.clear();
            if (today_ == 0) genesis();
            shocks();
            adjust_asks();
            board_dynamics();
            review_rounds();
            market();
            authors();
            faults();
            const bool last = today_ + 1 == sc_.horizon_days;
            if (opt_.metrics && ((today_ + 1) % sc_.sample_every == 0 || last)) {
                result_.metrics.push_back(sample(window_start));
                window_start = ledger().size();
            }
        }
        return std::move(result_);
    }

private:
    const Ledger& ledger() const { return result_.ledger; }
    const State& state() const { return result_.ledger.state(); }

    Rng& rng(const std::string& stream) {
        auto it = rngs_.find(stream);
        if (it == rngs_.end()) it = rngs_.emplace(stream, split_rng(sc_.seed, stream, today_)).first;
        return it->second;
    }
    Rng& rng(const Agent& a) { return rng(a.spec->name); }

    Agent* agent(const PersonId& id) {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &agents_[it->second];
    }
    const KeyPair& key_of(const PersonId& id) {
        Agent* a = agent(id);
        return a ? a->key : registrar_;
    }
    std::vector<KeyPair> keys_of(std::span<const PersonId> ids) {
        std::vector<KeyPair> out;
        for (const PersonId& p : ids) out.push_back(key_of(p));
        return out;
    }

    /// Appends one event. A rejected event is counted by code and leaves the
    /// ledger unchanged; the agents simply carry on.
    bool post(const KeyPair& actor, EventBody body) {
        ++result_.attempted;
        try {
            result_.ledger.append(actor, today_, std::move(body));
        } catch (const Error& e) {
            ++result_.rejected[std::string(code_name(e.code()))];
            return false;
        }
        if (check_) state().check_invariants();
        if (opt_.on_event) opt_.on_event(ledger(), ledger().events().back());
        return true;
    }

    std::vector<JournalId> live_journals() const {
        std::vector<JournalId> out;
        for (const auto& [id, rec] : state().journals()) {
            if (rec.live()) out.push_back(id);
        }
        return out;
    }

    // --- day 0 -------------------------------------------------------------

    void genesis() {
        post(registrar_, key_register(registrar_));
        for (const Agent& a : agents_) post(registrar_, key_register(a.key, true));
        for (const Agent& a : agents_) {
            if (a.spec->wallet > 0) post(registrar_, Mint{a.id, a.spec->wallet});
        }
        for (const Agent& a : agents_) {
            if (a.spec->reviewer) post(a.key, MarketAsk{a.spec->ask, a.spec->keywords, a.spec->capacity});
        }
        for (const JournalSpec& j : sc_.journals) {
            std::vector<KeyPair> founders;
            for (const std::string& name : j.founders) {
                founders.push_back(keygen_from_label("agent:" + name, sc_.scheme));
            }
            post(founders.front(), journal_create(j.title, founders, j.params));
        }
    }

    // --- reviewer supply ----------------------------------------------------

    void shocks() {
        for (const ShockSpec& s : sc_.shocks) {
            if (s.day != today_) continue;
            std::vector<Agent*> pool;
            for (Agent& a : agents_) {
                if (!a.exited && state().profiles().contains(a.id)) pool.push_back(&a);
            }
            auto k = static_cast<std::size_t>(std::llround(s.fraction * static_cast<double>(pool.size())));
            Rng& r = rng("#shock");
            for (std::size_t i = 0; i < k; ++i) {
                std::swap(pool[i], pool[i + r.below(pool.size() - i)]);
                Agent& a = *pool[i];
                a.exited = true;
                const ScientistProfile& p = state().profiles().at(a.id);
                post(a.key, MarketAsk{p.ask, p.keywords, p.active});
            }
        }
    }

    // Reviewers at least half booked raise their ask by 5%; those idle for two
    // weeks lower it by 5%.
    void adjust_asks() {
        // Reviewers who left wind their capacity down as their reviews finish.
        for (Agent& a : agents_) {
            auto it = state().profiles().find(a.id);
            if (!a.exited || it == state().profiles().end()) continue;
            const ScientistProfile& p = it->second;
            if (p.capacity > p.active) post(a.key, MarketAsk{p.ask, p.keywords, p.active});
        }
        if (today_ == 0 || today_ % kAskReviewEvery != 0) return;
        for (Agent& a : agents_) {
            auto it = state().profiles().find(a.id);
            if (a.exited || it == state().profiles().end()) continue;
            const ScientistProfile& p = it->second;
            Micro ask = p.ask;
            if (p.capacity > 0 && 2 * p.active >= p.capacity) {
                ask = p.ask + (p.ask + 19) / 20;
            } else if (p.active == 0 && p.ask > kAskFloor && today_ - a.last_busy > kIdleDays) {
                ask = std::max(kAskFloor, p.ask - p.ask / 20);
            }
            if (ask != p.ask) post(a.key, MarketAsk{ask, p.keywords, p.capacity});
        }
    }

    // --- journals -----------------------------------------------------------

    void transfer_to_successor(const JournalId& old_id, const KeyPair& actor) {
        const JournalRecord& rec = state().journal(old_id);
        if (!rec.descendant || state().balance(Owner::journal(old_id)) == 0) return;
        auto approvers = keys_of(rec.journal.board);
        post(actor, balance_transfer(old_id, *rec.descendant, approvers));
    }

    void board_dynamics() {
        // Joins bid on earlier days are voted on.
        for (const JournalId& id : live_journals()) {
            const JournalRecord& rec = state().journal(id);
            if (!rec.pending_join || rec.pending_join->bid_day >= today_) continue;
            std::vector<KeyPair> approvers;
            for (const PersonId& m : rec.journal.board) {
                if (Agent* a = agent(m); a && rng(*a).bernoulli(kJoinApprove)) approvers.push_back(a->key);
            }
            const KeyPair& actor = key_of(rec.journal.board.front());
            if (post(actor, join_decision(state(), id, approvers))) transfer_to_successor(id, actor);
        }

        for (Agent& a : agents_) {
            if (!a.spec->board) continue;
            if (a.spec->leave_rate > 0) {
                for (const JournalId& id : live_journals()) {
                    const JournalRecord& rec = state().journal(id);
                    if (!rec.journal.is_member(a.id) || rec.journal.board.size() < 2 || rec.pending_join) continue;
                    if (!rng(a).bernoulli(a.spec->leave_rate)) continue;
                    if (post(a.key, JournalModify{id, BoardRemove{a.id}, {}})) transfer_to_successor(id, a.key);
                }
            }
            if (a.spec->join_rate > 0 && rng(a).bernoulli(a.spec->join_rate)) {
                std::vector<JournalId> open;
                for (const JournalId& id : live_journals()) {
                    const JournalRecord& rec = state().journal(id);
                    if (!rec.journal.is_member(a.id) && !rec.pending_join) open.push_back(id);
                }
                if (!open.empty() && state().balance(Owner::person(a.id)) >= a.spec->join_bid) {
                    post(a.key, JoinBid{open[rng(a).below(open.size())], a.spec->join_bid});
                }
            }
        }

        if (today_ == 0 || today_ % kSpendEvery != 0) return;
        for (const JournalId& id : live_journals()) {
            const Journal& j = state().journal(id).journal;
            const Micro amount = state().balance(Owner::journal(id)) / 10;
            if (amount <= 0) continue;
            const PersonId& to = j.board[rng("#journal:" + id.hex()).below(j.board.size())];
            auto approvers = keys_of(j.board);
            post(key_of(j.board.front()), balance_spend(id, amount, Owner::person(to),
                                                        static_cast<std::uint64_t>(today_), approvers));
        }
    }

    // --- review rounds ------------------------------------------------------

    double quality(const ContentHash& paper) const {
        auto it = quality_.find(paper);
        return it == quality_.end() ? 3.0 : it->second;
    }

    void review_rounds() {
        std::vector<RoundId> ids;
        for (const auto& [id, r] : state().rounds()) {
            if (r.status != RoundStatus::Settled && r.status != RoundStatus::Failed) ids.push_back(id);
        }
        for (const RoundId& id : ids) advance_round(id);
    }

    void advance_round(const RoundId& id) {
        auto round = [&]() -> const ReviewRound& { return state().round(id); };
        const KeyPair& submitter = key_of(round().submitter);
        const double q = quality(round().paper);

        if (round().status == RoundStatus::Bid) {
            if (round().created_at >= today_) return;
            const Journal& j = state().journal(round().journal).journal;
            std::vector<KeyPair> approvers;
            for (const PersonId& m : j.board) {
                Agent* a = agent(m);
                if (!a || round().authors.contains(m)) continue;
                const double p = std::clamp(0.5 + 0.25 * (q - 3.0) + a->spec->accept_bias, 0.05, 0.95);
                if (rng(*a).bernoulli(p)) approvers.push_back(a->key);
            }
            post(submitter, accept_vote(id, approvers, &submitter));
        }
        if (round().status == RoundStatus::AcceptedForReview) post(submitter, ReviewerAssignment{id});

        if (round().status == RoundStatus::UnderReview) {
            if (today_ <= round().deadline) {
                const std::vector<PersonId> reviewers = round().reviewers;
                for (const PersonId& r : reviewers) {
                    Agent* a = agent(r);
                    if (!a || round().scores.contains(r) || !rng(*a).bernoulli(kReviewChancePerDay)) continue;
                    const int score = clamp_score(q + rng(*a).normal(0.0, kReviewNoise));
                    const ContentHash report = content_hash(fmt::format("report:{}:{}", id.hex(), r.hex()));
                    post(a->key, ReviewSubmit{id, static_cast<std::uint8_t>(score), report});
                }
            }
            if (round().scores.size() == round().reviewers.size() || today_ > round().deadline) {
                post(submitter, PublicationDecision{id});
            }
        }
        if (round().status == RoundStatus::Decided) {
            if (round().decision == Decision::Accept) {
                post(submitter, FinalVersion{id, content_hash("final:" + round().paper.hex())});
            } else {
                post(submitter, FeeSettlement{id});
            }
        }
        if (round().status == RoundStatus::FinalVote) {
            const std::vector<PersonId> reviewers = round().reviewers;
            for (const PersonId& r : reviewers) {
                Agent* a = agent(r);
                if (!a || round().final_votes.contains(r) || !rng(*a).bernoulli(kFinalVoteChancePerDay)) continue;
                post(a->key, FinalVote{id, rng(*a).bernoulli(kFinalApprove)});
            }
            if (round().final_votes.size() == round().reviewers.size() || today_ > round().final_deadline) {
                post(submitter, FeeSettlement{id});
            }
        }
    }

    // --- market ------------------------------------------------------------

    std::optional<std::vector<PersonId>> feasible_match(const std::set<std::string>& keywords,
                                                        const std::set<PersonId>& authors, Micro bid) const {
        auto pool = state().eligible_candidates(keywords, authors);
        return match_reviewers(pool, bid, state().config().reviewers_per_submission);
    }

    void market() {
        std::vector<const MarketSubmission*> open;
        for (const auto& [id, s] : state().submissions()) {
            if (s.status != SubmissionStatus::Settled && s.status != SubmissionStatus::Withdrawn) open.push_back(&s);
        }
        std::sort(open.begin(), open.end(),
                  [](const auto* x, const auto* y) { return x->created_seq < y->created_seq; });
        std::vector<SubmissionId> ids;
        for (const auto* s : open) ids.push_back(s->id);
        for (const SubmissionId& id : ids) advance_submission(id);
    }

    void advance_submission(const SubmissionId& id) {
        auto sub = [&]() -> const MarketSubmission& { return state().submission(id); };
        const KeyPair& submitter = key_of(sub().submitter);
        const double q = quality(sub().paper);

        if (sub().status == SubmissionStatus::Submitted) {
            auto chosen = feasible_match(sub().keywords, state().paper(sub().paper).authors, sub().bid);
            if (!chosen || !post(submitter, MarketMatch{id, *chosen})) return;
            for (const PersonId& r : *chosen) {
                if (Agent* a = agent(r)) a->last_busy = today_;
            }
            return;  // reviewers start the next day
        }
        const std::vector<PersonId> reviewers = sub().reviewers;
        if (sub().status == SubmissionStatus::Matched) {
            for (const PersonId& r : reviewers) {
                Agent* a = agent(r);
                if (!a || sub().paper_scores.contains(r) || !rng(*a).bernoulli(kMarketReviewChancePerDay)) continue;
                report_quality_[{id, r}] = rng(*a).normal(a->spec->skill, kReportQualitySd);
                const int score = clamp_score(q + rng(*a).normal(0.0, kReviewNoise));
                const ContentHash report = content_hash(fmt::format("report:{}:{}", id.hex(), r.hex()));
                post(a->key, MarketReview{id, static_cast<std::uint8_t>(score), report});
            }
            return;
        }
        if (sub().status == SubmissionStatus::Scored) {
            for (const PersonId& r : reviewers) {
                Agent* a = agent(r);
                if (!a || sub().report_scorers.contains(r) || !rng(*a).bernoulli(kMarketReviewChancePerDay)) continue;
                MarketReportScore body{id, {}};
                for (const PersonId& other : reviewers) {
                    if (other == r) continue;
                    const double rq = report_quality_.count({id, other}) ? report_quality_[{id, other}] : 3.0;
                    body.scores.emplace_back(other,
                                             static_cast<std::uint8_t>(clamp_score(rq + rng(*a).normal(0.0, kReportScoreNoise))));
                }
                post(a->key, std::move(body));
            }
        }
        if (sub().status == SubmissionStatus::ReportScored) post(submitter, MarketSettlement{id});
    }

    // --- authors -----------------------------------------------------------

    void authors() {
        for (Agent& a : agents_) {
            if (!a.spec->author || !rng(a).bernoulli(a.spec->submit_rate)) continue;
            Rng& r = rng(a);
            const ContentHash paper = content_hash(fmt::format("paper:{}:{}:{}", a.spec->name, today_, ++written_));
            std::set<std::string> keywords = a.spec->keywords;
            if (keywords.empty()) keywords.insert("general");
            std::set<ContentHash> cites;
            if (!state().papers().empty()) {
                const std::size_t want = r.below(kMaxCites + 1);
                for (std::size_t i = 0; i < want; ++i) {
                    auto it = state().papers().begin();
                    std::advance(it, static_cast<std::ptrdiff_t>(r.below(state().papers().size())));
                    cites.insert(it->first);
                }
            }
            const KeyPair signer[] = {a.key};
            if (!post(a.key, paper_publish(paper, signer, keywords, cites))) continue;
            quality_[paper] = std::clamp(r.normal(a.spec->quality_mean, a.spec->quality_sd), 1.0, 5.0);

            if (r.bernoulli(a.spec->market_share) && submit_to_market(a, paper, keywords)) continue;
            submit_to_journal(a, paper);
        }
    }

    bool submit_to_market(const Agent& a, const ContentHash& paper, const std::set<std::string>& keywords) {
        const std::set<PersonId> authors{a.id};
        auto pool = state().eligible_candidates(keywords, authors);
        if (pool.size() < std::max<std::size_t>(kMinMarketReviewers, state().config().reviewers_per_submission)) {
            return false;
        }
        std::vector<Micro> asks;
        for (const Candidate& c : pool) asks.push_back(c.ask);
        const auto bid = static_cast<Micro>(std::ceil(a.spec->bid_factor * static_cast<double>(suggest_fair_bid(asks))));
        if (bid > state().balance(Owner::person(a.id)) || !feasible_match(keywords, authors, bid)) return false;
        return post(a.key, MarketSubmit{paper, {}, bid});
    }

    void submit_to_journal(Agent& a, const ContentHash& paper) {
        std::vector<JournalId> options;
        for (const JournalId& id : live_journals()) {
            const Journal& j = state().journal(id).journal;
            const std::size_t eligible = j.board.size() - (j.is_member(a.id) ? 1 : 0);
            if (eligible >= j.params.reviewers_per_paper) options.push_back(id);
        }
        if (options.empty() || state().balance(Owner::person(a.id)) < a.spec->review_fee) return;
        post(a.key, ReviewBid{paper, options[rng(a).below(options.size())], a.spec->review_fee});
    }

    // --- faults ------------------------------------------------------------

    template <class Map>
    auto pick(const Map& m, Rng& r) -> typename Map::key_type {
        auto it = m.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(r.below(m.size())));
        return it->first;
    }

    // Random actions drawn without regard to preconditions. Most are rejected;
    // the rest are legal moves the honest policies would not have made.
    void faults() {
        if (sc_.fault_rate <= 0) return;
        for (Agent& a : agents_) {
            Rng& r = rng("#fault:" + a.spec->name);
            if (!r.bernoulli(sc_.fault_rate)) continue;
            const State& s = state();
            const auto score = static_cast<std::uint8_t>(r.below(7));
            const ContentHash junk = content_hash(fmt::format("junk:{}:{}", a.spec->name, today_));
            const Micro rich = s.balance(Owner::person(a.id)) + 1 + static_cast<Micro>(r.below(3));
            switch (r.below(10)) {
                case 0:
                    if (!s.journals().empty()) post(a.key, JoinBid{pick(s.journals(), r), rich});
                    break;
                case 1:
                    if (!s.rounds().empty()) post(a.key, ReviewSubmit{pick(s.rounds(), r), score, junk});
                    break;
                case 2:
                    if (!s.rounds().empty()) post(a.key, FeeSettlement{pick(s.rounds(), r)});
                    break;
                case 3:
                    if (!s.rounds().empty()) post(a.key, PublicationDecision{pick(s.rounds(), r)});
                    break;
                case 4:
                    if (!s.submissions().empty()) post(a.key, MarketReview{pick(s.submissions(), r), score, junk});
                    break;
                case 5:
                    if (!s.submissions().empty()) post(a.key, MarketSettlement{pick(s.submissions(), r)});
                    break;
                case 6:
                    if (!s.journals().empty()) {
                        const JournalId j = pick(s.journals(), r);
                        const Micro amount = s.balance(Owner::journal(j)) + static_cast<Micro>(r.below(2));
                        auto approvers = keys_of(s.journal(j).journal.board);
                        post(a.key, balance_spend(j, amount, Owner::person(a.id), r.below(3), approvers));
                    }
                    break;
                case 7:
                    if (!s.papers().empty()) {
                        const JournalId j = s.journals().empty() ? JournalId{} : pick(s.journals(), r);
                        post(a.key, ReviewBid{pick(s.papers(), r), j, rich});
                    }
                    break;
                case 8:
                    if (!s.papers().empty()) post(a.key, MarketSubmit{pick(s.papers(), r), {}, rich});
                    break;
                default:
                    if (!s.rounds().empty()) post(a.key, FinalVote{pick(s.rounds(), r), r.bernoulli(0.5)});
                    break;
            }
        }
    }

    // --- metrics -----------------------------------------------------------

    MetricsRow sample(std::uint64_t from) const {
        MetricsRow m;
        m.day = today_;
        Micro review_fees = 0, market_fees = 0, join_fees = 0;
        int bids = 0, matches = 0, joins = 0;
        const auto& events = ledger().events();
        for (std::size_t i = from; i < events.size(); ++i) {
            std::visit(
                [&](const auto& b) {
                    using T = std::decay_t<decltype(b)>;
                    if constexpr (std::is_same_v<T, ReviewBid>) {
                        ++m.submitted, ++bids, review_fees += b.fee;
                    } else if constexpr (std::is_same_v<T, MarketSubmit>) {
                        ++m.submitted;
                    } else if constexpr (std::is_same_v<T, FeeSettlement>) {
                        m.accepted += state().round(b.round).published ? 1 : 0;
                    } else if constexpr (std::is_same_v<T, MarketSettlement>) {
                        m.accepted += state().submission(b.submission).accepted ? 1 : 0;
                    } else if constexpr (std::is_same_v<T, MarketMatch>) {
                        ++matches;
                        for (const auto& [who, ask] : state().submission(b.submission).asks) market_fees += ask;
                    } else if constexpr (std::is_same_v<T, JoinBid>) {
                        ++joins, join_fees += b.bid;
                    }
                },
                events[i].body);
        }
        auto mean = [](Micro total, int n) {
            return n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(kMicroPerUnit) / n;
        };
        m.mean_review_fee = mean(review_fees, bids);
        m.mean_market_fee = mean(market_fees, matches);
        m.mean_join_fee = mean(join_fees, joins);

        std::vector<double> rs;
        for (const auto& [id, p] : state().profiles()) {
            m.reviewer_supply += static_cast<std::int64_t>(p.capacity) - static_cast<std::int64_t>(p.active);
            rs.push_back(static_cast<double>(p.rs) / static_cast<double>(kMicroPerUnit));
        }
        std::sort(rs.begin(), rs.end());
        auto pct = [&](double p) {
            if (rs.empty()) return 0.0;
            auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(rs.size())));
            return rs[std::max<std::size_t>(rank, 1) - 1];
        };
        m.rs_p10 = pct(0.1);
        m.rs_p50 = pct(0.5);
        m.rs_p90 = pct(0.9);

        const auto live = live_journals();
        if (!live.empty()) {
            SolverOptions so;
            so.at_day = today_;
            const ReputationState rep = solve_fixed_point(state().reputation_input(today_), so);
            double js = 0, bs = 0;
            for (const JournalId& id : live) {
                js += rep.journal_score.count(id) ? rep.journal_score.at(id) : 0.0;
                bs += rep.board_score.count(id) ? rep.board_score.at(id) : 0.0;
            }
            m.mean_journal_score = js / static_cast<double>(live.size());
            m.mean_board_score = bs / static_cast<double>(live.size());
        }
        return m;
    }

    const Scenario& sc_;
    const RunOptions& opt_;
    const bool check_;
    RunResult result_;
    KeyPair registrar_;
    std::vector<Agent> agents_;
    std::map<PersonId, std::size_t> index_;
    std::map<std::string, Rng> rngs_;
    std::map<ContentHash, double> quality_;
    std::map<std::pair<SubmissionId, PersonId>, double> report_quality_;
    std::uint64_t written_ = 0;
    Day today_ = 0;
};

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    return Engine(scenario, options).run();
}

std::string format_metrics(const std::vector<MetricsRow>& rows) {
    std::string out =
        "day\tsubmitted\taccepted\tmean_review_fee\tmean_market_fee\tmean_join_fee\treviewer_supply\t"
        "rs_p10\trs_p50\trs_p90\tjournal_score\tboard_score\n";
    for (const MetricsRow& r : rows) {
        out += fmt::format("{}\t{}\t{}\t{:.4f}\t{:.4f}\t{:.4f}\t{}\t{:.4f}\t{:.4f}\t{:.4f}\t{:.6g}\t{:.6g}\n", r.day,
                           r.submitted, r.accepted, r.mean_review_fee, r.mean_market_fee, r.mean_join_fee,
                           r.reviewer_supply, r.rs_p10, r.rs_p50, r.rs_p90, r.mean_journal_score,
                           r.mean_board_score);
    }
    return out;
}

std::string format_summary(const Scenario& scenario, const RunResult& result) {
    const State& s = result.ledger.state();
    std::size_t published = 0, failed = 0, settled = 0, accepted = 0, withdrawn = 0;
    for (const auto& [id, r] : s.rounds()) {
        published += r.published ? 1 : 0;
        failed += r.status == RoundStatus::Failed ? 1 : 0;
    }
    for (const auto& [id, sub] : s.submissions()) {
        settled += sub.status == SubmissionStatus::Settled || sub.status == SubmissionStatus::Withdrawn ? 1 : 0;
        accepted += sub.accepted ? 1 : 0;
        withdrawn += sub.status == SubmissionStatus::Withdrawn ? 1 : 0;
    }
    std::string out;
    auto line = [&](std::string_view k, const auto& v) { out += fmt::format("{}={}\n", k, v); };
    line("seed", scenario.seed);
    line("horizon_days", scenario.horizon_days);
    line("scheme", scheme_name(scenario.scheme));
    line("agents", scenario.agents.size());
    line("journals_founded", scenario.journals.size());
    line("fault_rate", scenario.fault_rate);
    const ProtocolConfig& c = scenario.config;
    line("reviewers_per_submission", c.reviewers_per_submission);
    line("report_threshold", format_credits(c.report_threshold));
    line("rs_update", c.rs_update == RsUpdate::Additive ? "additive" : "ema");
    line("ema_weight", c.ema_weight.str());
    line("initial_rs", format_credits(c.initial_rs));
    line("join_expiry_days", c.join_expiry_days);
    line("threshold.default", format_credits(c.thresholds.default_points));
    for (const auto& [field, v] : c.thresholds.by_field) line("threshold." + field, format_credits(v));
    line("events", result.ledger.size());
    line("attempted", result.attempted);
    for (const auto& [code, n] : result.rejected) line("rejected." + code, n);
    line("minted", format_credits(s.minted()));
    line("papers", s.papers().size());
    line("review_rounds", s.rounds().size());
    line("review_failed", failed);
    line("published", published);
    line("market_submissions", s.submissions().size());
    line("market_settled", settled);
    line("market_accepted", accepted);
    line("market_withdrawn", withdrawn);
    line("journal_snapshots", s.journals().size());
    line("ledger_head", result.ledger.head().hex());
    line("ledger_digest", content_hash(result.ledger.serialize()).hex());
    line("state_digest", s.digest().hex());
    return out;
}

}  // namespace principia
