#include <numeric>

#include "principia/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace principia;
using test::code_of;
using test::credits;
using test::World;

using oracle::Q;

TEST_CASE("fee split: equal scores split equally") {
    std::vector<int> s{4, 4, 4};
    Payout p = split_review_fee(900, Fraction::parse("0.2"), s);
    CHECK(p.reviewer_amounts == std::vector<Micro>{240, 240, 240});
    CHECK(p.journal_share == 180);
}

TEST_CASE("fee split: the outlier gets the smallest share") {
    std::vector<int> s{5, 5, 1};
    auto shares = oracle::fee_shares(s);
    CHECK(shares[0].n * 8 == 3 * shares[0].d);
    CHECK(shares[2].n * 4 == shares[2].d);

    const ShareWeights w = fee_share_weights(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(Q(w.numerators[i], w.denominator).n == shares[i].n);
        CHECK(Q(w.numerators[i], w.denominator).d == shares[i].d);
    }
    Payout p = split_review_fee(800, Fraction{0}, s);
    CHECK(p.reviewer_amounts == std::vector<Micro>{300, 300, 200});
    CHECK(p.total() == 800);
}

TEST_CASE("fee split: a single reviewer takes the whole reviewer part") {
    std::vector<int> s{4};
    Payout p = split_review_fee(1000, Fraction::parse("0.3"), s);
    CHECK(p.reviewer_amounts == std::vector<Micro>{700});
    CHECK(p.journal_share == 300);
}

TEST_CASE("fee split matches the exact oracle with clipping and renormalisation") {
    Rng rng(7);
    for (int iter = 0; iter < 2000; ++iter) {
        const std::size_t n = 1 + rng.below(6);
        std::vector<int> s(n);
        for (int& x : s) x = 1 + static_cast<int>(rng.below(5));
        const Micro fee = static_cast<Micro>(rng.below(1'000'000'001));
        const Fraction keep{static_cast<std::uint32_t>(rng.below(1'000'001))};
        CAPTURE(n);
        CAPTURE(fee);

        Payout p = split_review_fee(fee, keep, s);
        REQUIRE(p.total() == fee);

        auto shares = oracle::fee_shares(s);
        Q positive;
        for (Q& q : shares) {
            if (q.n < 0) q = Q(0);
            positive = positive + q;
        }
        const Q reviewer_pool = Q(fee) * (Q(1) - Q(keep.ppm, kMicroPerUnit));
        for (std::size_t i = 0; i < n; ++i) {
            Q exact = reviewer_pool * shares[i] / positive;
            CHECK(p.reviewer_amounts[i] >= 0);
            // Largest remainder moves each share by less than one unit.
            CHECK(Q(p.reviewer_amounts[i]) - exact < Q(1));
            CHECK(exact - Q(p.reviewer_amounts[i]) < Q(1));
        }
    }
}

TEST_CASE("fee split can produce negative raw shares, which are clipped") {
    std::vector<int> s{1, 1, 1, 1, 1, 3};
    const ShareWeights w = fee_share_weights(s);
    CHECK(*std::min_element(w.numerators.begin(), w.numerators.end()) < 0);
    Payout p = split_review_fee(1'000'000, Fraction{0}, s);
    CHECK(p.reviewer_amounts.back() == 0);
    CHECK(p.total() == 1'000'000);
}

TEST_CASE("failed round split") {
    Payout p = split_failed_round(1000, Fraction::parse("0.2"));
    CHECK(p.journal_share == 200);
    CHECK(p.refund_to_authors == 800);
}

TEST_CASE("publication decision is mean strictly above 3") {
    CHECK(decide_publication(std::vector<int>{4, 4, 1}) == Decision::Reject);
    CHECK(decide_publication(std::vector<int>{4, 4, 2}) == Decision::Accept);
    CHECK(decide_publication(std::vector<int>{3, 3, 3}) == Decision::Reject);
    CHECK(code_of([] { decide_publication(std::vector<int>{}); }) == ErrorCode::TooFewReviews);
    CHECK(code_of([] { decide_publication(std::vector<int>{6}); }) == ErrorCode::ScoreOutOfRange);
    CHECK(code_of([] { decide_publication(std::vector<int>{0}); }) == ErrorCode::ScoreOutOfRange);
}

TEST_CASE("reviewer selection excludes authors and is deterministic") {
    std::vector<PersonId> board;
    for (int i = 0; i < 6; ++i) board.push_back(keygen_from_label(std::to_string(i), Scheme::TestHmac).id());
    std::set<PersonId> authors{board[0]};
    auto seed = content_hash(std::string_view{"seed"});
    auto a = select_reviewers(board, authors, 3, seed);
    CHECK(a == select_reviewers(board, authors, 3, seed));
    CHECK(a.size() == 3);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::find(a.begin(), a.end(), board[0]) == a.end());
    CHECK(code_of([&] { select_reviewers(board, authors, 6, seed); }) == ErrorCode::NotEnoughEligibleReviewers);
}

TEST_CASE("pseudonyms differ per paper and round") {
    PersonId r = keygen_from_label("r").id();
    ContentHash p1 = content_hash(std::string_view{"p1"}), p2 = content_hash(std::string_view{"p2"});
    RoundId r1 = make_round_id(p1, JournalId{}, 1);
    ContentHash salt{};
    CHECK(pseudonym(r, p1, r1, salt) != pseudonym(r, p2, r1, salt));
    CHECK(pseudonym(r, p1, r1, salt) == pseudonym(r, p1, r1, salt));
}

namespace {

struct ReviewWorld : World {
    JournalId j;
    ContentHash paper;
    RoundId round;
    std::vector<std::string> board{"b1", "b2", "b3", "b4", "b5"};

    explicit ReviewWorld(std::string_view p = "f=0.2,n=3,t=30,r=0.5") {
        for (const auto& b : board) add(b, credits(10));
        add("author", credits(100));
        j = create_journal("Review", board, JournalParams::parse(p));
        paper = publish("paper-1", {"author"});
        act("author", ReviewBid{paper, j, credits(9)});
        round = make_round_id(paper, j, ledger.size() - 1);
    }

    std::string name_of(const PersonId& p) {
        for (const auto& b : board) if (id(b) == p) return b;
        return "?";
    }

    std::vector<std::string> accept_and_assign() {
        auto author = key("author");
        act("b1", accept_vote(round, keys_of({"b1", "b2", "b3"}), &author));
        act("b1", ReviewerAssignment{round});
        std::vector<std::string> out;
        for (const PersonId& r : state().round(round).reviewers) out.push_back(name_of(r));
        return out;
    }

    std::string outsider(const std::vector<std::string>& reviewers) {
        for (const auto& b : board) {
            if (std::find(reviewers.begin(), reviewers.end(), b) == reviewers.end()) return b;
        }
        return "";
    }
};

}  // namespace

TEST_CASE("review round: accepted paper is published and the fee split") {
    ReviewWorld w;
    CHECK(w.balance("author") == credits(91));
    auto reviewers = w.accept_and_assign();
    REQUIRE(reviewers.size() == 3);
    CHECK(w.state().round(w.round).status == RoundStatus::UnderReview);

    const std::string other = w.outsider(reviewers);
    CHECK(w.try_act(other, ReviewSubmit{w.round, 4, {}}) == ErrorCode::NotAssigned);
    CHECK(w.try_act(reviewers[0], ReviewSubmit{w.round, 6, {}}) == ErrorCode::ScoreOutOfRange);
    w.act(reviewers[0], ReviewSubmit{w.round, 4, content_hash(std::string_view{"r0"})});
    CHECK(w.try_act(reviewers[0], ReviewSubmit{w.round, 4, {}}) == ErrorCode::DuplicateReview);
    CHECK(w.try_act("b1", PublicationDecision{w.round}) == ErrorCode::PreconditionFailed);
    w.act(reviewers[1], ReviewSubmit{w.round, 4, {}});
    w.act(reviewers[2], ReviewSubmit{w.round, 4, {}});
    w.act("author", PublicationDecision{w.round});
    CHECK(w.state().round(w.round).decision == Decision::Accept);

    w.act("author", FinalVersion{w.round, content_hash(std::string_view{"final"})});
    CHECK(w.try_act(other, FinalVote{w.round, true}) == ErrorCode::VoteFromNonReviewer);
    w.act(reviewers[0], FinalVote{w.round, true});
    w.act(reviewers[1], FinalVote{w.round, true});
    w.act(reviewers[2], FinalVote{w.round, false});
    w.act("author", FeeSettlement{w.round});

    const auto& r = w.state().round(w.round);
    CHECK(r.status == RoundStatus::Settled);
    CHECK(r.published);
    CHECK(w.state().paper(w.paper).published_in == w.j);
    CHECK(w.state().balance(Owner::journal(w.j)) == credits(9) / 5);
    for (const auto& name : reviewers) CHECK(w.balance(name) == credits(10) + credits(9) * 4 / 15);
    w.state().check_invariants();
}

TEST_CASE("review round: final vote without majority does not publish") {
    ReviewWorld w;
    auto reviewers = w.accept_and_assign();
    for (const auto& r : reviewers) w.act(r, ReviewSubmit{w.round, 5, {}});
    w.act("author", PublicationDecision{w.round});
    w.act("author", FinalVersion{w.round, content_hash(std::string_view{"final"})});
    w.act(reviewers[0], FinalVote{w.round, true});
    CHECK(w.try_act("author", FeeSettlement{w.round}) == ErrorCode::PreconditionFailed);
    w.day += 31;
    w.act("author", FeeSettlement{w.round});
    CHECK_FALSE(w.state().round(w.round).published);
    CHECK_FALSE(w.state().paper(w.paper).published_in);
    w.state().check_invariants();
}

TEST_CASE("review round: rejection still pays reviewers") {
    ReviewWorld w;
    auto reviewers = w.accept_and_assign();
    for (const auto& r : reviewers) w.act(r, ReviewSubmit{w.round, 2, {}});
    w.act("author", PublicationDecision{w.round});
    CHECK(w.state().round(w.round).decision == Decision::Reject);
    CHECK(w.try_act("author", FinalVersion{w.round, {}}) == ErrorCode::WrongStatus);
    w.act("author", FeeSettlement{w.round});
    CHECK(w.state().round(w.round).status == RoundStatus::Settled);
    CHECK(w.state().balance(Owner::escrow(w.round)) == 0);
    w.state().check_invariants();
}

TEST_CASE("review round: missing quorum refunds the bid in full") {
    ReviewWorld w;
    auto author = w.key("author");
    // ceil(0.5 * 5) = 3
    w.act("b1", accept_vote(w.round, w.keys_of({"b1", "b2"}), &author));
    CHECK(w.state().round(w.round).status == RoundStatus::Failed);
    CHECK(w.balance("author") == credits(100));
    CHECK_FALSE(w.state().paper(w.paper).active_round);
}

TEST_CASE("review round: missing author confirmation refunds") {
    ReviewWorld w;
    w.act("b1", accept_vote(w.round, w.keys_of({"b1", "b2", "b3"}), nullptr));
    CHECK(w.state().round(w.round).status == RoundStatus::Failed);
    CHECK(w.balance("author") == credits(100));
}

TEST_CASE("review round: deadline and too few reviews") {
    ReviewWorld w;
    auto reviewers = w.accept_and_assign();
    w.act(reviewers[0], ReviewSubmit{w.round, 4, {}});
    w.day += 31;
    CHECK(w.try_act(reviewers[1], ReviewSubmit{w.round, 4, {}}) == ErrorCode::PastDeadline);
    w.act("author", PublicationDecision{w.round});
    const auto& r = w.state().round(w.round);
    CHECK(r.status == RoundStatus::Failed);
    CHECK(w.balance("author") == credits(91) + credits(9) * 4 / 5);
    CHECK(w.state().balance(Owner::journal(w.j)) == credits(9) / 5);
    w.state().check_invariants();
}

TEST_CASE("review round: late but sufficient reviews still decide") {
    ReviewWorld w;
    auto reviewers = w.accept_and_assign();
    w.act(reviewers[0], ReviewSubmit{w.round, 5, {}});
    w.act(reviewers[1], ReviewSubmit{w.round, 1, {}});
    w.day += 31;
    w.act("author", PublicationDecision{w.round});
    CHECK(w.state().round(w.round).decision == Decision::Reject);
    w.act("author", FeeSettlement{w.round});
    for (const auto& name : {reviewers[0], reviewers[1]}) CHECK(w.balance(name) > credits(10));
    CHECK(w.balance(reviewers[2]) == credits(10));
    w.state().check_invariants();
}

TEST_CASE("bids go to the live journal only") {
    ReviewWorld w;
    w.act("b1", journal_modify(w.j, BoardAdd{w.id("author")}, w.keys_of({"b1", "b2", "b3", "b4"})));
    auto p2 = w.publish("paper-2", {"author"});
    CHECK(w.try_act("author", ReviewBid{p2, w.j, credits(1)}) == ErrorCode::JournalSuperseded);
    CHECK(w.try_act("author", ReviewBid{w.paper, *w.state().journal(w.j).descendant, credits(1)}) ==
          ErrorCode::PreconditionFailed);
}

TEST_CASE("papers need all author signatures") {
    World w;
    w.add("a");
    w.add("b");
    auto body = paper_publish(content_hash(std::string_view{"x"}), w.keys_of({"a"}));
    body.authors.insert(w.id("b"));
    CHECK(w.try_act("a", body) == ErrorCode::BadSignature);
    w.publish("x", {"a", "b"});
    CHECK(w.try_act("a", paper_publish(content_hash(std::string_view{"x"}), w.keys_of({"a"}))) ==
          ErrorCode::PreconditionFailed);
}
