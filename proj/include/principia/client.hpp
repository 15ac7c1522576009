#pragma once

// Builders for event bodies that carry signatures other than the actor's:
// founder signatures, board approvals, author confirmations.

#include <span>
#include <string>
#include <vector>

#include "principia/events.hpp"
#include "principia/state.hpp"

namespace principia {

std::vector<Signature> sign_all(std::span<const KeyPair> signers, ByteView payload);

KeyRegister key_register(const KeyPair& key, bool validated = false);

JournalCreate journal_create(std::string title, std::span<const KeyPair> founders, JournalParams params);
JournalModify journal_modify(const JournalId& journal, JournalChange change, std::span<const KeyPair> approvers);
/// Approvals for the join currently pending on `journal`.
JoinDecision join_decision(const State& state, const JournalId& journal, std::span<const KeyPair> approvers);
BalanceSpend balance_spend(const JournalId& journal, Micro amount, const Owner& recipient,
                           std::uint64_t nonce, std::span<const KeyPair> approvers);
BalanceTransfer balance_transfer(const JournalId& ancestor, const JournalId& descendant,
                                 std::span<const KeyPair> approvers);

PaperPublish paper_publish(const ContentHash& paper, std::span<const KeyPair> authors,
                           std::set<std::string> keywords = {}, std::set<ContentHash> cites = {});
ReviewAcceptVote accept_vote(const RoundId& round, std::span<const KeyPair> approvers, const KeyPair* author);

}  // namespace principia
