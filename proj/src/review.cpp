#include "principia/review.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "principia/error.hpp"
#include "principia/journal.hpp"
#include "principia/quorum.hpp"
#include "principia/rng.hpp"
#include "transition.hpp"

namespace principia {

std::string_view status_name(RoundStatus s) noexcept {
    switch (s) {
        case RoundStatus::Bid: return "bid";
        case RoundStatus::AcceptedForReview: return "accepted-for-review";
        case RoundStatus::UnderReview: return "under-review";
        case RoundStatus::Decided: return "decided";
        case RoundStatus::FinalVote: return "final-vote";
        case RoundStatus::Settled: return "settled";
        case RoundStatus::Failed: return "failed";
    }
    return "unknown";
}

Micro Payout::total() const {
    return std::accumulate(reviewer_amounts.begin(), reviewer_amounts.end(), Micro{0}) + journal_share +
           refund_to_authors;
}

namespace {

void check_scores(std::span<const int> scores) {
    for (int s : scores) {
        require(s >= kMinScore && s <= kMaxScore, ErrorCode::ScoreOutOfRange,
                fmt::format("score {} outside {}..{}", s, kMinScore, kMaxScore));
    }
}

}  // namespace

ShareWeights fee_share_weights(std::span<const int> scores) {
    require(!scores.empty(), ErrorCode::TooFewReviews, "fee split needs at least one score");
    check_scores(scores);
    const auto n = static_cast<std::int64_t>(scores.size());
    const std::int64_t total = std::accumulate(scores.begin(), scores.end(), std::int64_t{0});

    // Distances are scaled so every term stays integral: |s - 3| as is, and
    // |s - mean| multiplied by n.
    std::vector<std::int64_t> from_mid(scores.size());
    std::vector<std::int64_t> from_mean(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        from_mid[i] = std::abs(scores[i] - kAcceptAbove);
        from_mean[i] = std::abs(n * scores[i] - total);
    }
    auto sum = [](const std::vector<std::int64_t>& v) {
        return std::accumulate(v.begin(), v.end(), std::int64_t{0});
    };
    std::int64_t mid_total = sum(from_mid);
    std::int64_t mean_total = sum(from_mean);
    // Degenerate ratio: nobody is distinguishable, use 1/n.
    if (mid_total == 0) {
        std::fill(from_mid.begin(), from_mid.end(), 1);
        mid_total = n;
    }
    if (mean_total == 0) {
        std::fill(from_mean.begin(), from_mean.end(), 1);
        mean_total = n;
    }

    ShareWeights w;
    w.denominator = 2 * n * mid_total * mean_total;
    w.numerators.resize(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        w.numerators[i] = 2 * mid_total * mean_total + n * mean_total * from_mid[i] -
                          n * mid_total * from_mean[i];
    }
    return w;
}

Payout split_review_fee(Micro fee, Fraction keep_fraction, std::span<const int> scores) {
    require(fee >= 0, ErrorCode::PreconditionFailed, "negative fee");
    require(keep_fraction.ppm <= kMicroPerUnit, ErrorCode::BadParams, "keep fraction above 1");
    const ShareWeights w = fee_share_weights(scores);

    std::vector<__int128> weights;
    weights.reserve(scores.size() + 1);
    __int128 positive_total = 0;
    for (std::int64_t num : w.numerators) {
        positive_total += std::max<std::int64_t>(num, 0);
    }
    const __int128 reviewer_part = kMicroPerUnit - keep_fraction.ppm;
    for (std::int64_t num : w.numerators) {
        weights.push_back(reviewer_part * std::max<std::int64_t>(num, 0));
    }
    weights.push_back(static_cast<__int128>(keep_fraction.ppm) * positive_total);

    std::vector<Micro> amounts = apportion(fee, weights);
    Payout p;
    p.journal_share = amounts.back();
    amounts.pop_back();
    p.reviewer_amounts = std::move(amounts);
    return p;
}

Payout split_failed_round(Micro fee, Fraction keep_fraction) {
    const std::array<__int128, 2> weights{keep_fraction.ppm, kMicroPerUnit - keep_fraction.ppm};
    auto amounts = apportion(fee, weights);
    Payout p;
    p.journal_share = amounts[0];
    p.refund_to_authors = amounts[1];
    return p;
}

Decision decide_publication(std::span<const int> scores) {
    require(!scores.empty(), ErrorCode::TooFewReviews, "no scores to decide on");
    check_scores(scores);
    const long total = std::accumulate(scores.begin(), scores.end(), 0L);
    return total > static_cast<long>(kAcceptAbove) * static_cast<long>(scores.size()) ? Decision::Accept
                                                                                       : Decision::Reject;
}

ContentHash assignment_seed(const JournalId& journal, const ContentHash& paper, std::uint64_t nonce) {
    Writer w;
    w.str("principia.assign").digest(journal).digest(paper).u64(nonce);
    return content_hash(w.bytes());
}

std::vector<PersonId> select_reviewers(std::span<const PersonId> board, const std::set<PersonId>& authors,
                                       std::size_t n, const ContentHash& seed) {
    std::vector<PersonId> eligible;
    for (const PersonId& p : board) {
        if (!authors.contains(p)) eligible.push_back(p);
    }
    std::sort(eligible.begin(), eligible.end());
    eligible.erase(std::unique(eligible.begin(), eligible.end()), eligible.end());
    require(eligible.size() >= n, ErrorCode::NotEnoughEligibleReviewers,
            fmt::format("{} eligible board members, {} reviewers required", eligible.size(), n));

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(n);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

ContentHash pseudonym(const PersonId& reviewer, const ContentHash& paper, const RoundId& round,
                      const ContentHash& salt) {
    Writer w;
    w.str("principia.pseudonym").digest(reviewer).digest(paper).digest(round).digest(salt);
    return content_hash(w.bytes());
}

Bytes accept_proposal(const RoundId& round) {
    Writer w;
    w.str("principia.proposal.accept-for-review").digest(round);
    return w.take();
}

Bytes confirm_proposal(const RoundId& round) {
    Writer w;
    w.str("principia.proposal.author-confirm").digest(round);
    return w.take();
}

Bytes authorship_message(const ContentHash& paper) {
    Writer w;
    w.str("principia.authorship").digest(paper);
    return w.take();
}

RoundId make_round_id(const ContentHash& paper, const JournalId& journal, std::uint64_t seq) {
    Writer w;
    w.str("principia.round").digest(paper).digest(journal).u64(seq);
    return RoundId::from(content_hash(w.bytes()));
}

bool ReviewRound::is_reviewer(const PersonId& p) const {
    return std::binary_search(reviewers.begin(), reviewers.end(), p);
}

std::vector<int> ReviewRound::submitted_scores() const {
    std::vector<int> out;
    for (const auto& [who, s] : scores) out.push_back(s);
    return out;
}

void ReviewRound::encode(Writer& w) const {
    w.digest(id).digest(paper).digest(journal).digest(submitter);
    w.collection(authors, [](Writer& w, const PersonId& p) { w.digest(p); });
    w.i64(fee).u8(static_cast<std::uint8_t>(status)).u64(created_seq).i64(created_at);
    w.list(reviewers, [](Writer& w, const PersonId& p) { w.digest(p); });
    w.collection(scores, [](Writer& w, const auto& kv) { w.digest(kv.first).u8(static_cast<std::uint8_t>(kv.second)); });
    w.collection(reports, [](Writer& w, const auto& kv) { w.digest(kv.first).digest(kv.second); });
    w.i64(deadline);
    w.u8(decision ? static_cast<std::uint8_t>(*decision) + 1 : 0);
    w.boolean(final_version.has_value());
    if (final_version) w.digest(*final_version);
    w.i64(final_deadline);
    w.collection(final_votes, [](Writer& w, const auto& kv) { w.digest(kv.first).boolean(kv.second); });
    w.boolean(published);
    w.boolean(payout.has_value());
    if (payout) {
        w.list(payout->reviewer_amounts, [](Writer& w, Micro m) { w.i64(m); });
        w.i64(payout->journal_share).i64(payout->refund_to_authors);
    }
    w.str(note);
}

// --- ledger transitions -------------------------------------------------------------

namespace {

void close_round(Transition& t, ReviewRound& round) {
    auto it = t.papers().find(round.paper);
    if (it != t.papers().end() && it->second.active_round == round.id) {
        it->second.active_round.reset();
    }
}

void require_status(const ReviewRound& round, RoundStatus expected) {
    require(round.status == expected, ErrorCode::WrongStatus,
            fmt::format("round is {}, expected {}", status_name(round.status), status_name(expected)));
}

bool is_author(const ReviewRound& round, const PersonId& p) { return round.authors.contains(p); }

}  // namespace

void apply_body(Transition& t, const PaperPublish& b) {
    require(!b.authors.empty(), ErrorCode::PreconditionFailed, "a paper needs at least one author");
    require(b.authors.contains(t.actor()), ErrorCode::PreconditionFailed, "publisher must be an author");
    require(!t.papers().contains(b.paper), ErrorCode::PreconditionFailed, "paper already registered");
    require(!b.cites.contains(b.paper), ErrorCode::PreconditionFailed, "a paper cannot cite itself");
    const Bytes message = authorship_message(b.paper);
    std::set<PersonId> signed_by;
    for (const Signature& sig : b.author_signatures) {
        require(t.keys().verify(message, sig), ErrorCode::BadSignature,
                "invalid author signature from " + sig.signer.short_hex());
        signed_by.insert(sig.signer);
    }
    for (const PersonId& a : b.authors) {
        require(t.keys().contains(a), ErrorCode::UnknownEntity, "author " + a.short_hex() + " not registered");
        require(signed_by.contains(a), ErrorCode::BadSignature, "author " + a.short_hex() + " did not sign");
    }
    for (const auto& k : b.keywords) {
        require(!k.empty(), ErrorCode::PreconditionFailed, "empty keyword");
    }

    PaperRecord rec;
    rec.hash = b.paper;
    rec.authors = b.authors;
    rec.keywords = b.keywords;
    rec.cites = b.cites;
    rec.registered_at = t.now();
    t.papers().emplace(b.paper, std::move(rec));
}

void apply_body(Transition& t, const CitationDeclare& b) {
    PaperRecord& paper = t.paper(b.paper);
    require(paper.authors.contains(t.actor()), ErrorCode::PreconditionFailed,
            "only an author may declare citations");
    require(!b.cites.contains(b.paper), ErrorCode::PreconditionFailed, "a paper cannot cite itself");
    paper.cites.insert(b.cites.begin(), b.cites.end());
}

void apply_body(Transition& t, const ReviewBid& b) {
    PaperRecord& paper = t.paper(b.paper);
    require(paper.authors.contains(t.actor()), ErrorCode::PreconditionFailed, "only an author may bid");
    require(!paper.published_in, ErrorCode::PreconditionFailed, "paper already published");
    require(!paper.active_round, ErrorCode::PreconditionFailed, "paper already has an open review round");
    const JournalRecord& journal = t.journal(b.journal);
    require(journal.live(), ErrorCode::JournalSuperseded,
            "journal " + b.journal.short_hex() + " has a descendant; submit there");
    t.require_funds(Owner::person(t.actor()), b.fee);

    ReviewRound round;
    round.id = make_round_id(b.paper, b.journal, t.seq());
    require(!t.rounds().contains(round.id), ErrorCode::PreconditionFailed, "round already exists");
    round.paper = b.paper;
    round.journal = b.journal;
    round.submitter = t.actor();
    round.authors = paper.authors;
    round.fee = b.fee;
    round.created_seq = t.seq();
    round.created_at = t.now();

    t.move(Owner::person(t.actor()), Owner::escrow(round.id), b.fee);
    paper.active_round = round.id;
    t.rounds().emplace(round.id, std::move(round));
}

void apply_body(Transition& t, const ReviewAcceptVote& b) {
    ReviewRound& round = t.round(b.round);
    require_status(round, RoundStatus::Bid);
    const JournalRecord& rec = t.journal(round.journal);
    const Journal& journal = rec.journal;
    require(journal.is_member(t.actor()) || is_author(round, t.actor()), ErrorCode::NotMember,
            "only board members or authors may close the acceptance vote");

    std::string reason;
    auto q = tally_approvals(t.keys(), journal.board, journal.params.review_quorum, b.approvals,
                             accept_proposal(b.round));
    bool confirmed = false;
    if (b.author_confirmation) {
        const Signature& c = *b.author_confirmation;
        require(is_author(round, c.signer), ErrorCode::PreconditionFailed, "confirmation not from an author");
        require(t.keys().verify(confirm_proposal(b.round), c), ErrorCode::BadSignature,
                "invalid author confirmation");
        confirmed = true;
    }
    std::size_t eligible = 0;
    for (const PersonId& p : journal.board) {
        if (!is_author(round, p)) ++eligible;
    }

    if (!rec.live()) {
        reason = "journal superseded before the vote";
    } else if (!q.met()) {
        reason = fmt::format("quorum not met: {} of {} approvals", q.got.size(), q.required);
    } else if (!confirmed) {
        reason = "authors did not confirm";
    } else if (eligible < journal.params.reviewers_per_paper) {
        reason = "not enough eligible reviewers";
    }

    if (reason.empty()) {
        round.status = RoundStatus::AcceptedForReview;
        return;
    }
    t.move(Owner::escrow(round.id), Owner::person(round.submitter), round.fee);
    Payout refund;
    refund.refund_to_authors = round.fee;
    round.payout = refund;
    round.status = RoundStatus::Failed;
    round.note = reason;
    close_round(t, round);
}

void apply_body(Transition& t, const ReviewerAssignment& b) {
    ReviewRound& round = t.round(b.round);
    require_status(round, RoundStatus::AcceptedForReview);
    const Journal& journal = t.journal(round.journal).journal;
    require(journal.is_member(t.actor()) || is_author(round, t.actor()), ErrorCode::NotMember,
            "only board members or authors may trigger assignment");
    auto reviewers = select_reviewers(journal.board, round.authors, journal.params.reviewers_per_paper,
                                      assignment_seed(round.journal, round.paper, round.created_seq));

    round.reviewers = std::move(reviewers);
    round.deadline = t.now() + journal.params.max_review_days;
    round.status = RoundStatus::UnderReview;
}

void apply_body(Transition& t, const ReviewSubmit& b) {
    ReviewRound& round = t.round(b.round);
    require_status(round, RoundStatus::UnderReview);
    require(round.is_reviewer(t.actor()), ErrorCode::NotAssigned, "not an assigned reviewer");
    require(t.now() <= round.deadline, ErrorCode::PastDeadline,
            fmt::format("deadline was day {}", round.deadline));
    require(!round.scores.contains(t.actor()), ErrorCode::DuplicateReview, "review already submitted");
    require(b.score >= kMinScore && b.score <= kMaxScore, ErrorCode::ScoreOutOfRange,
            fmt::format("score {} outside {}..{}", b.score, kMinScore, kMaxScore));

    round.scores[t.actor()] = b.score;
    round.reports[t.actor()] = b.report;
}

void apply_body(Transition& t, const PublicationDecision& b) {
    ReviewRound& round = t.round(b.round);
    require_status(round, RoundStatus::UnderReview);
    const Journal& journal = t.journal(round.journal).journal;
    require(round.scores.size() == round.reviewers.size() || t.now() > round.deadline,
            ErrorCode::PreconditionFailed, "reviews outstanding and deadline not reached");

    if (round.scores.size() < min_reviews_for_decision(journal.params.reviewers_per_paper)) {
        Payout p = split_failed_round(round.fee, journal.params.keep_fraction);
        t.move(Owner::escrow(round.id), Owner::journal(round.journal), p.journal_share);
        t.move(Owner::escrow(round.id), Owner::person(round.submitter), p.refund_to_authors);
        round.payout = p;
        round.status = RoundStatus::Failed;
        round.note = fmt::format("too few reviews: {} of {}", round.scores.size(), round.reviewers.size());
        close_round(t, round);
        return;
    }
    round.decision = decide_publication(round.submitted_scores());
    round.final_deadline = t.now() + journal.params.max_review_days;
    round.status = RoundStatus::Decided;
}

void apply_body(Transition& t, const FinalVersion& b) {
    ReviewRound& round = t.round(b.round);
    require_status(round, RoundStatus::Decided);
    require(round.decision == Decision::Accept, ErrorCode::WrongStatus, "paper was not accepted");
    require(is_author(round, t.actor()), ErrorCode::PreconditionFailed, "only an author may submit the final version");
    const Journal& journal = t.journal(round.journal).journal;

    round.final_version = b.final_version;
    round.final_deadline = t.now() + journal.params.max_review_days;
    round.status = RoundStatus::FinalVote;
}

void apply_body(Transition& t, const FinalVote& b) {
    ReviewRound& round = t.round(b.round);
    require_status(round, RoundStatus::FinalVote);
    require(round.is_reviewer(t.actor()), ErrorCode::VoteFromNonReviewer, "only the round's reviewers vote");
    require(!round.final_votes.contains(t.actor()), ErrorCode::Duplicate, "already voted");
    round.final_votes[t.actor()] = b.approve;
}

void apply_body(Transition& t, const FeeSettlement& b) {
    ReviewRound& round = t.round(b.round);
    bool publish = false;
    if (round.status == RoundStatus::Decided) {
        require(round.decision == Decision::Reject || t.now() > round.final_deadline,
                ErrorCode::PreconditionFailed, "waiting for the authors' final version");
    } else if (round.status == RoundStatus::FinalVote) {
        require(round.final_votes.size() == round.reviewers.size() || t.now() > round.final_deadline,
                ErrorCode::PreconditionFailed, "final votes outstanding");
        std::size_t approvals = 0;
        for (const auto& [who, yes] : round.final_votes) approvals += yes ? 1 : 0;
        publish = final_vote_passes(approvals, round.reviewers.size());
    } else {
        fail(ErrorCode::WrongStatus, fmt::format("round is {}", status_name(round.status)));
    }
    const Journal& journal = t.journal(round.journal).journal;
    Payout p = split_review_fee(round.fee, journal.params.keep_fraction, round.submitted_scores());

    std::size_t i = 0;
    for (const auto& [who, score] : round.scores) {
        t.move(Owner::escrow(round.id), Owner::person(who), p.reviewer_amounts[i++]);
    }
    t.move(Owner::escrow(round.id), Owner::journal(round.journal), p.journal_share);
    round.payout = std::move(p);
    round.status = RoundStatus::Settled;
    round.published = publish;
    if (publish) {
        PaperRecord& paper = t.paper(round.paper);
        paper.published_in = round.journal;
        paper.published_at = t.now();
        t.journal(round.journal).publications.push_back(round.paper);
    }
    close_round(t, round);
}

}  // namespace principia
