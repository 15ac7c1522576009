// Acceptance suite: one line per criterion, PASS or FAIL, with the time taken
// against its budget. Exit status is the number of failures.

#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "principia/client.hpp"
#include "principia/error.hpp"
#include "principia/ledger.hpp"
#include "principia/review.hpp"
#include "principia/rng.hpp"
#include "principia/sim.hpp"

using namespace principia;
using oracle::Q;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    int failures = 0;

    // Records a failed check; keeps the first message.
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail = what;
        pass = false;
        ++failures;
    }
};

PersonId pid(int i) { return PersonId::from(content_hash(fmt::format("person{}", i))); }
JournalId jid(int i) { return JournalId::from(content_hash(fmt::format("journal{}", i))); }
ContentHash paper_hash(int i) { return content_hash(fmt::format("paper{}", i)); }

// 1. Time-weighted user score on the worked example.
Outcome worked_example() {
    Outcome o;
    std::vector<std::pair<Day, double>> service{{6, 10.0}, {12, 5.0}};
    const double got = time_weighted_score(service);
    o.expect(std::abs(got - 20.0 / 3.0) < 1e-6, fmt::format("user score {}", got));
    if (o.pass) o.detail = fmt::format("user score {:.9f}", got);
    return o;
}

// 2. Fee split conserves the fee exactly and never pays a negative amount.
Outcome fee_split_conservation() {
    Outcome o;
    Rng rng(2024);
    for (int i = 0; i < 10'000; ++i) {
        const std::size_t n = 1 + rng.below(6);
        std::vector<int> scores(n);
        for (int& s : scores) s = 1 + static_cast<int>(rng.below(5));
        const Micro fee = static_cast<Micro>(rng.below(1'000'000'001));
        const Fraction keep{static_cast<std::uint32_t>(rng.below(1'000'001))};

        const Payout p = split_review_fee(fee, keep, scores);
        Micro sum = p.journal_share + p.refund_to_authors;
        for (Micro r : p.reviewer_amounts) {
            o.expect(r >= 0, fmt::format("case {}: negative reviewer amount", i));
            sum += r;
        }
        o.expect(sum == fee, fmt::format("case {}: paid {} of {}", i, sum, fee));
        o.expect(p.journal_share >= 0, fmt::format("case {}: negative journal share", i));
        const auto exact = oracle::fee_amounts(fee, keep.ppm, scores);
        for (std::size_t u = 0; u < n; ++u) {
            const Q diff = (Q(p.reviewer_amounts[u]) - exact[u]).abs();
            o.expect(diff < Q(1), fmt::format("case {}: reviewer {} off the exact split by >= 1 micro", i, u));
        }

        const Payout f = split_failed_round(fee, keep);
        o.expect(f.journal_share + f.refund_to_authors == fee && f.journal_share >= 0 && f.refund_to_authors >= 0,
                 fmt::format("case {}: failed-round split does not conserve", i));
    }
    if (o.pass) o.detail = "10000 cases, exact";
    return o;
}

// 3. Publication decision against the brute-force mean.
Outcome decision_oracle() {
    Outcome o;
    int cases = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= 5;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<int> s(n);
            std::size_t c = code;
            for (int& x : s) x = 1 + static_cast<int>(c % 5), c /= 5;
            const bool got = decide_publication(s) == Decision::Accept;
            o.expect(got == oracle::accepts(s), fmt::format("mismatch at n={} code={}", n, code));
            ++cases;
        }
    }
    if (o.pass) o.detail = fmt::format("{} score vectors", cases);
    return o;
}

// 4. Quorum pass/fail for every approval count, through signed approvals.
Outcome quorum_arithmetic() {
    Outcome o;
    const std::pair<const char*, std::pair<std::uint64_t, std::uint64_t>> fractions[] = {
        {"0.34", {34, 100}}, {"0.5", {1, 2}}, {"0.51", {51, 100}},
        {"0.66", {66, 100}}, {"0.75", {3, 4}}, {"1.0", {1, 1}}};
    std::vector<KeyPair> keys;
    KeyRegistry registry;
    for (int i = 0; i < 12; ++i) {
        keys.push_back(keygen_from_label(fmt::format("member{}", i), Scheme::TestHmac));
        registry.add({Scheme::TestHmac, keys.back().public_key, true});
    }
    const Bytes payload = spend_proposal(jid(0), 1, Owner::person(pid(0)), 0);
    int checks = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<PersonId> board;
        for (std::size_t i = 0; i < n; ++i) board.push_back(keys[i].id());
        std::sort(board.begin(), board.end());
        for (const auto& [text, frac] : fractions) {
            const Fraction q = Fraction::parse(text);
            const std::size_t need = oracle::quorum(frac.first, frac.second, n);
            o.expect(required_approvals(q, n) == need, fmt::format("q={} n={}: required count", text, n));
            for (std::size_t k = 0; k <= n; ++k) {
                auto approvals = sign_all(std::span(keys).first(k), payload);
                const bool met = tally_approvals(registry, board, q, approvals, payload).met();
                o.expect(met == (k >= need), fmt::format("q={} n={} k={}", text, n, k));
                ++checks;
            }
        }
    }
    if (o.pass) o.detail = fmt::format("{} approval counts", checks);
    return o;
}

// 5. Matching against exhaustive subset enumeration.
Outcome matching_optimality() {
    Outcome o;
    Rng rng(55);
    int infeasible = 0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t m = rng.below(11);
        std::vector<Candidate> pool;
        for (std::size_t c = 0; c < m; ++c) {
            pool.push_back({pid(static_cast<int>(c)), static_cast<Micro>(1 + rng.below(40)) * 250'000,
                            static_cast<RsPoints>(rng.below(5'000'000))});
        }
        const Micro budget = static_cast<Micro>(rng.below(90)) * 500'000;
        const auto want = oracle::best_match(pool, budget, 3);
        const auto got = match_reviewers(pool, budget, 3);
        infeasible += want ? 0 : 1;
        o.expect(got == want, fmt::format("pool {} (size {}, budget {})", i, m, budget));
    }
    if (o.pass) o.detail = fmt::format("200 pools, {} infeasible", infeasible);
    return o;
}

// Random reputation instance. With `acyclic`, citations go from higher to
// lower journal index and members of board K only serve on journals >= K, so
// evaluating journals from the highest index down is a valid order.
ReputationInput reputation_instance(Rng& rng, bool acyclic, int& n_journals) {
    ReputationInput in;
    n_journals = 1 + static_cast<int>(rng.below(10));
    const int n_people = 1 + static_cast<int>(rng.below(15));
    std::map<int, int> top_board;  // person -> highest board index
    for (int j = 0; j < n_journals; ++j) {
        std::set<PersonId> members;
        const int size = 1 + static_cast<int>(rng.below(3));
        for (int k = 0; k < size; ++k) {
            const int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_people)));
            members.insert(pid(p));
            top_board[p] = std::max(top_board.count(p) ? top_board[p] : 0, j);
        }
        in.boards[jid(j)] = {members.begin(), members.end()};
    }
    const int n_papers = static_cast<int>(rng.below(41));
    std::vector<int> journal_of;
    for (int p = 0; p < n_papers; ++p) {
        journal_of.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n_journals))));
        in.papers.push_back({paper_hash(p), jid(journal_of.back()), 0});
    }
    for (int c = 0; c < 2 * n_papers; ++c) {
        const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_papers)));
        const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_papers)));
        if (a == b || (acyclic && journal_of[a] <= journal_of[b])) continue;
        in.citations.push_back({paper_hash(a), paper_hash(b)});
    }
    // A few citations from unpublished papers, which carry no weight.
    if (n_papers > 0) in.citations.push_back({paper_hash(1000), paper_hash(0)});
    for (int p = 0; p < n_people; ++p) {
        const int lo = acyclic && top_board.count(p) ? top_board[p] : 0;
        const int spans = static_cast<int>(rng.below(4));
        for (int s = 0; s < spans; ++s) {
            const int j = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_journals - lo)));
            const Day from = static_cast<Day>(rng.below(50));
            in.intervals.push_back({pid(p), jid(j), from, from + static_cast<Day>(rng.below(30))});
        }
    }
    return in;
}

// 6. Fixed point against bottom-up evaluation; cyclic instances converge or say so.
Outcome reputation_fixed_point() {
    Outcome o;
    Rng rng(66);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        int nj = 0;
        const ReputationInput in = reputation_instance(rng, true, nj);
        std::vector<JournalId> order;
        for (int j = nj - 1; j >= 0; --j) order.push_back(jid(j));
        const auto want = oracle::bottom_up_scores(in, order);
        const ReputationState got = solve_fixed_point(in);
        o.expect(got.converged, fmt::format("acyclic {}: did not converge", i));
        for (const auto& [j, v] : want) {
            const double err = std::abs(got.journal_score.at(j) - v);
            worst = std::max(worst, err);
            o.expect(err < 1e-7, fmt::format("acyclic {}: journal off by {}", i, err));
        }
    }
    int converged = 0, reported = 0;
    for (int i = 0; i < 50; ++i) {
        int nj = 0;
        const ReputationInput in = reputation_instance(rng, false, nj);
        const ReputationState got = solve_fixed_point(in);
        if (got.converged) {
            ++converged;
            o.expect(got.iterations < 1000, fmt::format("cyclic {}: {} iterations", i, got.iterations));
            const auto next = oracle::next_scores(in, got.journal_score);
            for (const auto& [j, v] : next) {
                const double err = std::abs(v - got.journal_score.at(j));
                o.expect(err <= 1e-6 * std::max(1.0, std::abs(v)), fmt::format("cyclic {}: not a fixed point", i));
            }
        } else {
            ++reported;
            o.expect(!std::isfinite(got.residual) || got.iterations == 1000,
                     fmt::format("cyclic {}: stopped early without reason", i));
            for (const auto& [j, v] : got.journal_score) {
                o.expect(std::isfinite(v), fmt::format("cyclic {}: non-finite score returned", i));
            }
        }
    }
    if (o.pass) {
        o.detail = fmt::format("acyclic max error {:.2e}; cyclic {} converged, {} reported NonConvergence", worst,
                               converged, reported);
    }
    return o;
}

// 7. Replay reproduces every prefix; any single flipped byte is caught.
Outcome replay_determinism() {
    Outcome o;
    std::uint64_t events = 0, flips = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Scenario sc = random_scenario(7000 + seed);
        std::vector<ContentHash> live;
        RunOptions opt;
        opt.metrics = false;
        opt.on_event = [&](const Ledger& l, const Event&) { live.push_back(l.state().digest()); };
        const RunResult r = run(sc, opt);
        events += r.ledger.size();

        const Bytes bytes = r.ledger.serialize();
        const Ledger back = Ledger::deserialize(bytes);
        Ledger fresh(back.config());
        for (std::size_t i = 0; i < back.events().size(); ++i) {
            fresh.append(back.events()[i]);
            o.expect(fresh.state().digest() == live[i], fmt::format("scenario {}: prefix {} differs", seed, i + 1));
        }
        o.expect(back.serialize() == bytes, fmt::format("scenario {}: re-serialisation differs", seed));

        Rng rng(seed);
        for (int k = 0; k < 40; ++k) {
            Bytes bad = bytes;
            const std::size_t at = rng.below(bad.size());
            bad[at] ^= static_cast<std::uint8_t>(1 + rng.below(255));
            ++flips;
            bool caught = false;
            try {
                Ledger::deserialize(bad);
            } catch (const Error& e) {
                caught = e.code() == ErrorCode::ChainBreak;
            }
            o.expect(caught, fmt::format("scenario {}: flip at byte {} not reported as CHAIN_BREAK", seed, at));
        }
    }
    if (o.pass) o.detail = fmt::format("{} events, {} corrupted copies", events, flips);
    return o;
}

// 8. Sum of all balances equals credits minted, checked after every event.
Outcome money_conservation() {
    Outcome o;
    std::uint64_t events = 0, rejected = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Scenario sc = random_scenario(seed);
        std::optional<Micro> genesis_total;
        RunOptions opt;
        opt.metrics = false;
        opt.on_event = [&](const Ledger& l, const Event&) {
            const State& s = l.state();
            Micro sum = 0;
            for (const auto& [owner, amount] : s.wallets()) sum += amount;
            o.expect(sum == s.minted(), fmt::format("scenario {} seq {}: balances {} != minted {}", seed,
                                                    l.size() - 1, sum, s.minted()));
            if (!s.genesis_open()) {
                if (!genesis_total) genesis_total = sum;
                o.expect(sum == *genesis_total, fmt::format("scenario {}: total moved after genesis", seed));
            }
        };
        const RunResult r = run(sc, opt);
        std::uint64_t rej = 0;
        for (const auto& [code, n] : r.rejected) rej += n;
        o.expect(r.ledger.size() + rej == r.attempted, fmt::format("scenario {}: event count mismatch", seed));
        events += r.ledger.size();
        rejected += rej;
    }
    if (o.pass) o.detail = fmt::format("{} events, {} rejected attempts", events, rejected);
    return o;
}

// 9. Each member of a 6-member board is chosen about half the time for n=3.
Outcome selection_uniformity() {
    Outcome o;
    std::vector<PersonId> board;
    for (int i = 0; i < 6; ++i) board.push_back(pid(i));
    std::sort(board.begin(), board.end());
    std::map<PersonId, int> hits;
    const int draws = 10'000;
    for (int i = 0; i < draws; ++i) {
        const auto chosen = select_reviewers(board, {pid(99)}, 3, assignment_seed(jid(1), paper_hash(i), 0));
        for (const PersonId& p : chosen) ++hits[p];
    }
    double lo = 1, hi = 0;
    for (const PersonId& p : board) {
        const double f = static_cast<double>(hits[p]) / draws;
        lo = std::min(lo, f), hi = std::max(hi, f);
        o.expect(std::abs(f - 0.5) <= 0.03, fmt::format("member inclusion {:.4f}", f));
    }
    if (o.pass) o.detail = fmt::format("inclusion {:.4f}..{:.4f}", lo, hi);
    return o;
}

// 10. Settlement through the ledger, checked against the rules directly.
Outcome market_settlement() {
    Outcome o;
    ProtocolConfig cfg;
    cfg.thresholds.by_field["g"] = 3'500'000;
    Ledger ledger(cfg);
    Rng rng(1010);
    const KeyPair registrar = keygen_from_label("registrar", Scheme::TestHmac);
    const KeyPair author = keygen_from_label("author", Scheme::TestHmac);
    ledger.append(registrar, 0, key_register(registrar, true));
    ledger.append(registrar, 0, key_register(author, true));
    ledger.append(registrar, 0, Mint{author.id(), 1'000'000 * kMicroPerUnit});
    std::map<PersonId, KeyPair> reviewers;
    for (int i = 0; i < 8; ++i) {
        KeyPair k = keygen_from_label(fmt::format("reviewer{}", i), Scheme::TestHmac);
        ledger.append(registrar, 0, key_register(k, true));
        reviewers[k.id()] = k;
    }
    for (const auto& [id, k] : reviewers) {
        ledger.append(k, 0, MarketAsk{static_cast<Micro>(1 + rng.below(5)) * kMicroPerUnit, {"f", "g"}, 1000});
    }
    const State& s = ledger.state();
    auto bal = [&](const PersonId& p) { return s.balance(Owner::person(p)); };
    int paid = 0, unpaid = 0, accepted = 0;

    for (int i = 0; i < 1000; ++i) {
        const ContentHash paper = content_hash(fmt::format("market paper {}", i));
        const std::set<std::string> field{rng.bernoulli(0.5) ? "f" : "g"};
        const KeyPair signer[] = {author};
        ledger.append(author, 0, paper_publish(paper, signer, field));
        const Micro bid = static_cast<Micro>(15 + rng.below(10)) * kMicroPerUnit + static_cast<Micro>(rng.below(1000));
        ledger.append(author, 0, MarketSubmit{paper, {}, bid});
        const SubmissionId sub = make_submission_id(paper, ledger.size() - 1);
        auto chosen = match_reviewers(s.eligible_candidates(field, {author.id()}), bid);
        if (!chosen) {
            o.expect(false, fmt::format("submission {}: no match", i));
            continue;
        }
        ledger.append(author, 0, MarketMatch{sub, *chosen});
        int paper_sum = 0;
        for (const PersonId& r : *chosen) {
            const int score = 1 + static_cast<int>(rng.below(5));
            paper_sum += score;
            ledger.append(reviewers[r], 0, MarketReview{sub, static_cast<std::uint8_t>(score), paper});
        }
        std::map<PersonId, std::pair<int, int>> received;  // sum, count
        for (const PersonId& r : *chosen) {
            MarketReportScore body{sub, {}};
            for (const PersonId& other : *chosen) {
                if (other == r) continue;
                const int score = 1 + static_cast<int>(rng.below(5));
                body.scores.emplace_back(other, static_cast<std::uint8_t>(score));
                received[other].first += score;
                ++received[other].second;
            }
            ledger.append(reviewers[r], 0, std::move(body));
        }

        std::map<PersonId, Micro> before;
        std::map<PersonId, RsPoints> rs_before;
        for (const PersonId& r : *chosen) before[r] = bal(r), rs_before[r] = s.profiles().at(r).rs;
        const Micro author_before = bal(author.id());
        const std::map<PersonId, Micro> asks = s.submission(sub).asks;
        ledger.append(author, 0, MarketSettlement{sub});

        Micro paid_total = 0;
        for (const PersonId& r : *chosen) {
            const auto [sum, count] = received[r];
            const bool should_pay = !(Q(sum, count) < Q(3));  // mean >= 3.0
            const Micro got = bal(r) - before[r];
            o.expect(got == (should_pay ? asks.at(r) : 0), fmt::format("submission {}: payment", i));
            paid_total += got;
            (should_pay ? paid : unpaid) += 1;
            const Q expected_rs = Q(rs_before[r]) + Q(static_cast<__int128>(sum) * kMicroPerUnit, count);
            const Q diff = (Q(s.profiles().at(r).rs) - expected_rs).abs();
            o.expect(!(Q(1, 2) < diff), fmt::format("submission {}: RS update", i));
        }
        o.expect(bal(author.id()) - author_before == bid - paid_total, fmt::format("submission {}: refund", i));
        const Q tau(field.contains("g") ? 35 : 30, 10);
        const bool should_accept = tau < Q(paper_sum, 3);
        o.expect(s.submission(sub).accepted == should_accept, fmt::format("submission {}: acceptance", i));
        accepted += should_accept;
    }
    if (o.pass) {
        o.detail = fmt::format("1000 submissions, {} reviewers paid, {} unpaid, {} accepted", paid, unpaid, accepted);
    }
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "worked example: user score 6.666...", 1, worked_example},
        {2, "fee-split conservation", 5, fee_split_conservation},
        {3, "publication decision oracle", 1, decision_oracle},
        {4, "quorum arithmetic", 1, quorum_arithmetic},
        {5, "matching optimality", 10, matching_optimality},
        {6, "reputation fixed point", 30, reputation_fixed_point},
        {7, "replay determinism", 60, replay_determinism},
        {8, "money conservation end-to-end", 120, money_conservation},
        {9, "reviewer-selection uniformity", 5, selection_uniformity},
        {10, "market settlement rules", 5, market_settlement},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (out.pass && secs > c.budget_s) {
            out.pass = false;
            out.detail = "over time budget; " + out.detail;
        }
        failed += out.pass ? 0 : 1;
        fmt::print("criterion {:>2}: {} {} ({:.3f}s / {:.0f}s) {}\n", c.id, out.pass ? "PASS" : "FAIL", c.name, secs,
                   c.budget_s, out.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed;
}
