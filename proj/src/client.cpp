#include "principia/client.hpp"

#include "principia/error.hpp"
#include "principia/review.hpp"

namespace principia {

std::vector<Signature> sign_all(std::span<const KeyPair> signers, ByteView payload) {
    std::vector<Signature> out;
    out.reserve(signers.size());
    for (const KeyPair& k : signers) out.push_back(sign(k, payload));
    return out;
}

KeyRegister key_register(const KeyPair& key, bool validated) {
    return KeyRegister{key.scheme, key.public_key, validated};
}

JournalCreate journal_create(std::string title, std::span<const KeyPair> founders, JournalParams params) {
    JournalCreate b;
    for (const KeyPair& k : founders) b.founders.insert(k.id());
    b.signatures = sign_all(founders, create_proposal(title, b.founders, params));
    b.title = std::move(title);
    b.params = params;
    return b;
}

JournalModify journal_modify(const JournalId& journal, JournalChange change, std::span<const KeyPair> approvers) {
    JournalModify b{journal, std::move(change), {}};
    b.approvals = sign_all(approvers, modify_proposal(journal, b.change));
    return b;
}

JoinDecision join_decision(const State& state, const JournalId& journal, std::span<const KeyPair> approvers) {
    const JournalRecord& rec = state.journal(journal);
    require(rec.pending_join.has_value(), ErrorCode::PreconditionFailed, "no pending join on this journal");
    const PendingJoin& pj = *rec.pending_join;
    return JoinDecision{journal, sign_all(approvers, join_proposal(journal, pj.candidate, pj.bid, pj.bid_seq))};
}

BalanceSpend balance_spend(const JournalId& journal, Micro amount, const Owner& recipient, std::uint64_t nonce,
                           std::span<const KeyPair> approvers) {
    return BalanceSpend{journal, amount, recipient, nonce,
                        sign_all(approvers, spend_proposal(journal, amount, recipient, nonce))};
}

BalanceTransfer balance_transfer(const JournalId& ancestor, const JournalId& descendant,
                                 std::span<const KeyPair> approvers) {
    return BalanceTransfer{ancestor, descendant, sign_all(approvers, transfer_proposal(ancestor, descendant))};
}

PaperPublish paper_publish(const ContentHash& paper, std::span<const KeyPair> authors,
                           std::set<std::string> keywords, std::set<ContentHash> cites) {
    PaperPublish b;
    b.paper = paper;
    for (const KeyPair& k : authors) b.authors.insert(k.id());
    b.author_signatures = sign_all(authors, authorship_message(paper));
    b.keywords = std::move(keywords);
    b.cites = std::move(cites);
    return b;
}

ReviewAcceptVote accept_vote(const RoundId& round, std::span<const KeyPair> approvers, const KeyPair* author) {
    ReviewAcceptVote b;
    b.round = round;
    b.approvals = sign_all(approvers, accept_proposal(round));
    if (author) b.author_confirmation = sign(*author, confirm_proposal(round));
    return b;
}

}  // namespace principia
