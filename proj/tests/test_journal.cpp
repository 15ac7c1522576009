#include "support.hpp"

using namespace principia;
using test::code_of;
using test::credits;
using test::World;

namespace {

JournalParams params(std::string_view text) { return JournalParams::parse(text); }

struct Board : World {
    JournalId j;
    Board() {
        for (auto n : {"alice", "bob", "carol", "dave", "erin"}) add(n, credits(100));
        j = create_journal("J", {"alice", "bob", "carol"}, params("f=0.2,m=0.66,p=0.5,r=0.5"));
    }
};

}  // namespace

TEST_CASE("journal params validation") {
    CHECK_NOTHROW(params("f=0.2,a=1,t=30,n=3,r=0.5,p=0.5,m=0.66").validate());
    CHECK(code_of([] { params("p=0.7,m=0.6").validate(); }) == ErrorCode::BadParams);
    CHECK(code_of([] { params("p=0.6,m=0.6").validate(); }) == ErrorCode::BadParams);
    CHECK(code_of([] { params("n=0").validate(); }) == ErrorCode::BadParams);
    CHECK(code_of([] { params("t=0").validate(); }) == ErrorCode::BadParams);
    CHECK(code_of([] { params("r=0").validate(); }) == ErrorCode::BadParams);
    CHECK(code_of([] { params("x=1"); }) == ErrorCode::BadParams);
}

TEST_CASE("journal params encoding distinguishes fields") {
    Writer a, b;
    params("f=0.2").encode(a);
    params("f=0.3").encode(b);
    CHECK(a.bytes() != b.bytes());
    Reader r(a.bytes());
    CHECK(JournalParams::decode(r) == params("f=0.2"));
    CHECK(JournalParams::parse(params("f=0.25,a=1,n=4").str()) == params("f=0.25,a=1,n=4"));
}

TEST_CASE("journal creation needs every founder's signature") {
    World w;
    w.add("alice");
    w.add("bob");
    JournalCreate b = journal_create("J", w.keys_of({"alice", "bob"}), {});
    b.signatures.pop_back();
    CHECK(w.try_act("alice", b) == ErrorCode::MissingFounderSignature);

    JournalCreate forged = journal_create("J", w.keys_of({"alice", "bob"}), {});
    forged.signatures[1].bytes[0] ^= 1;
    CHECK(w.try_act("alice", forged) == ErrorCode::BadSignature);

    JournalCreate empty = journal_create("J", {}, {});
    CHECK(w.try_act("alice", empty) == ErrorCode::EmptyBoardResult);

    JournalId j = w.create_journal("J", {"alice", "bob"});
    const auto& rec = w.state().journal(j);
    CHECK(rec.live());
    CHECK(rec.journal.board.size() == 2);
    CHECK(w.try_act("alice", journal_create("J", w.keys_of({"alice", "bob"}), {})) ==
          ErrorCode::PreconditionFailed);
}

TEST_CASE("modification needs the modify quorum and supersedes the journal") {
    Board w;
    // ceil(0.66 * 3) = 2 approvals
    auto one = journal_modify(w.j, BoardAdd{w.id("dave")}, w.keys_of({"alice"}));
    CHECK(w.try_act("alice", one) == ErrorCode::QuorumNotMet);

    auto outsiders = journal_modify(w.j, BoardAdd{w.id("dave")}, w.keys_of({"dave", "erin"}));
    CHECK(w.try_act("alice", outsiders) == ErrorCode::QuorumNotMet);

    auto two = journal_modify(w.j, BoardAdd{w.id("dave")}, w.keys_of({"alice", "bob"}));
    w.act("alice", two);
    const auto& old = w.state().journal(w.j);
    REQUIRE(old.descendant);
    CHECK_FALSE(old.live());
    const auto& succ = w.state().journal(*old.descendant);
    CHECK(succ.journal.ancestor == w.j);
    CHECK(succ.journal.is_member(w.id("dave")));
    CHECK(w.state().lineage(succ.journal.id) == std::vector<JournalId>{w.j, succ.journal.id});

    auto again = journal_modify(w.j, BoardAdd{w.id("erin")}, w.keys_of({"alice", "bob"}));
    CHECK(w.try_act("alice", again) == ErrorCode::AlreadySuperseded);
}

TEST_CASE("membership changes check the board") {
    Board w;
    CHECK(w.try_act("alice", journal_modify(w.j, BoardAdd{w.id("bob")}, w.keys_of({"alice", "bob"}))) ==
          ErrorCode::AlreadyMember);
    CHECK(w.try_act("alice", journal_modify(w.j, BoardRemove{w.id("dave")}, w.keys_of({"alice", "bob"}))) ==
          ErrorCode::NotMember);
    JournalParams bad = params("p=0.9,m=0.5");
    CHECK(w.try_act("alice", journal_modify(w.j, ParamChange{bad}, w.keys_of({"alice", "bob"}))) ==
          ErrorCode::BadParams);
}

TEST_CASE("a member may leave without approvals but the board cannot empty") {
    World w;
    w.add("solo");
    w.add("pair");
    JournalId j = w.create_journal("S", {"solo", "pair"});
    w.act("pair", JournalModify{j, BoardRemove{w.id("pair")}, {}});
    JournalId next = *w.state().journal(j).descendant;
    CHECK(w.state().journal(next).journal.board == std::vector<PersonId>{w.id("solo")});
    CHECK(w.try_act("solo", JournalModify{next, BoardRemove{w.id("solo")}, {}}) == ErrorCode::EmptyBoardResult);
}

TEST_CASE("joining by bid: accepted bids fund the new journal") {
    Board w;
    w.act("dave", JoinBid{w.j, credits(10)});
    CHECK(w.balance("dave") == credits(90));
    CHECK(w.try_act("erin", JoinBid{w.j, credits(5)}) == ErrorCode::PendingProposal);
    CHECK(w.try_act("alice", journal_modify(w.j, BoardAdd{w.id("erin")}, w.keys_of({"alice", "bob"}))) ==
          ErrorCode::PendingProposal);

    w.act("alice", join_decision(w.state(), w.j, w.keys_of({"alice", "carol"})));
    JournalId next = *w.state().journal(w.j).descendant;
    CHECK(w.state().journal(next).journal.is_member(w.id("dave")));
    CHECK(w.state().balance(Owner::journal(next)) == credits(10));
    CHECK(w.balance("dave") == credits(90));
    w.state().check_invariants();
}

TEST_CASE("joining by bid: rejected or expired bids are refunded") {
    Board w;
    w.act("dave", JoinBid{w.j, credits(10)});
    w.act("alice", join_decision(w.state(), w.j, w.keys_of({"alice"})));
    CHECK(w.state().journal(w.j).live());
    CHECK(w.balance("dave") == credits(100));

    w.act("erin", JoinBid{w.j, credits(7)});
    w.day += 15;
    w.act("erin", join_decision(w.state(), w.j, w.keys_of({"alice", "bob", "carol"})));
    CHECK(w.state().journal(w.j).live());
    CHECK(w.balance("erin") == credits(100));

    CHECK(w.try_act("alice", JoinBid{w.j, credits(1)}) == ErrorCode::AlreadyMember);
    CHECK(w.try_act("dave", JoinBid{w.j, credits(1000)}) == ErrorCode::InsufficientFunds);
}

TEST_CASE("spending the journal balance") {
    Board w;
    w.act("dave", JoinBid{w.j, credits(20)});
    w.act("alice", join_decision(w.state(), w.j, w.keys_of({"alice", "bob"})));
    JournalId j2 = *w.state().journal(w.j).descendant;
    // board is now alice, bob, carol, dave: p = 0.5 needs 2
    auto to_erin = Owner::person(w.id("erin"));
    CHECK(w.try_act("alice", balance_spend(j2, credits(5), to_erin, 1, w.keys_of({"alice"}))) ==
          ErrorCode::QuorumNotMet);
    w.act("alice", balance_spend(j2, credits(5), to_erin, 1, w.keys_of({"alice", "dave"})));
    CHECK(w.balance("erin") == credits(105));
    CHECK(w.try_act("alice", balance_spend(j2, credits(5), to_erin, 1, w.keys_of({"alice", "dave"}))) ==
          ErrorCode::PreconditionFailed);
    CHECK(w.try_act("alice", balance_spend(j2, credits(50), to_erin, 2, w.keys_of({"alice", "dave"}))) ==
          ErrorCode::InsufficientFunds);
    w.state().check_invariants();
}

TEST_CASE("balance transfer only to a direct descendant") {
    Board w;
    w.act("dave", JoinBid{w.j, credits(20)});
    w.act("alice", join_decision(w.state(), w.j, w.keys_of({"alice", "bob"})));
    JournalId j2 = *w.state().journal(w.j).descendant;
    w.act("alice", journal_modify(j2, BoardAdd{w.id("erin")}, w.keys_of({"alice", "bob", "carol"})));
    JournalId j3 = *w.state().journal(j2).descendant;

    CHECK(w.try_act("alice", balance_transfer(w.j, j3, w.keys_of({"alice", "bob"}))) == ErrorCode::NotDescendant);
    w.act("alice", balance_transfer(j2, j3, w.keys_of({"alice", "bob"})));
    CHECK(w.state().balance(Owner::journal(j2)) == 0);
    CHECK(w.state().balance(Owner::journal(j3)) == credits(20));
}

TEST_CASE("a member signature that fails to verify is an error") {
    Board w;
    auto m = journal_modify(w.j, BoardAdd{w.id("dave")}, w.keys_of({"alice", "bob"}));
    m.approvals[0].bytes[3] ^= 0x40;
    CHECK(w.try_act("alice", m) == ErrorCode::BadSignature);
}
