#include "support.hpp"

using namespace principia;
using test::code_of;
using test::credits;
using test::World;

namespace {

std::vector<EventBody> one_of_each() {
    KeyPair k = keygen_from_label("k", Scheme::TestHmac);
    PersonId p = k.id();
    JournalId j = JournalId::from(content_hash(std::string_view{"j"}));
    RoundId r = RoundId::from(content_hash(std::string_view{"r"}));
    SubmissionId s = SubmissionId::from(content_hash(std::string_view{"s"}));
    ContentHash h = content_hash(std::string_view{"h"});
    Signature sig = sign(k, Bytes{1});
    return {
        KeyRegister{Scheme::TestHmac, k.public_key, true},
        JournalCreate{"title", {p}, JournalParams::parse("f=0.1,a=1"), {sig}},
        JournalModify{j, BoardRemove{p}, {sig}},
        JoinBid{j, 5},
        JoinDecision{j, {sig, sig}},
        BalanceSpend{j, 7, Owner::person(p), 3, {sig}},
        BalanceTransfer{j, j, {}},
        PaperPublish{h, {p}, {sig}, {"a", "b"}, {h}},
        ReviewBid{h, j, 9},
        ReviewAcceptVote{r, {sig}, sig},
        ReviewerAssignment{r},
        ReviewSubmit{r, 4, h},
        PublicationDecision{r},
        FinalVersion{r, h},
        FinalVote{r, true},
        FeeSettlement{r},
        CitationDeclare{h, {h}},
        MarketSubmit{h, {"x"}, 11},
        MarketMatch{s, {p, p}},
        MarketReview{s, 2, h},
        MarketReportScore{s, {{p, 3}}},
        MarketSettlement{s},
        Mint{p, 100},
        MarketAsk{12, {"y"}, 2},
    };
}

World sample_world() {
    World w;
    w.add("a", credits(50));
    w.add("b", credits(50));
    w.add("c", credits(50));
    auto j = w.create_journal("J", {"a", "b"});
    w.day = 3;
    auto p = w.publish("p", {"a"});
    w.act("a", CitationDeclare{p, {content_hash(std::string_view{"elsewhere"})}});
    w.act("c", JoinBid{j, credits(2)});
    return w;
}

}  // namespace

TEST_CASE("every event kind round-trips through its encoding") {
    auto bodies = one_of_each();
    REQUIRE(bodies.size() == std::variant_size_v<EventBody>);
    KeyPair k = keygen_from_label("actor", Scheme::TestHmac);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        CAPTURE(kind_name(static_cast<EventKind>(i)));
        Event e;
        e.seq = i;
        e.timestamp = static_cast<Day>(i);
        e.actor = k.id();
        e.body = bodies[i];
        e.signature = sign(k, e.signing_bytes());
        CHECK(static_cast<std::size_t>(e.kind()) == i);
        Event back = Event::decode(e.encode());
        CHECK(back.encode() == e.encode());
        CHECK(back.hash() == e.hash());
        CHECK_FALSE(e.describe().empty());
    }
}

TEST_CASE("decoding rejects trailing and truncated bytes") {
    KeyPair k = keygen_from_label("actor", Scheme::TestHmac);
    Event e;
    e.actor = k.id();
    e.body = MarketAsk{1, {"z"}, 1};
    e.signature = sign(k, e.signing_bytes());
    Bytes bytes = e.encode();
    Bytes longer = bytes;
    longer.push_back(0);
    CHECK(code_of([&] { Event::decode(longer); }) == ErrorCode::Decode);
    Bytes shorter(bytes.begin(), bytes.end() - 1);
    CHECK(code_of([&] { Event::decode(shorter); }) == ErrorCode::Decode);
}

TEST_CASE("chain links and signatures are enforced") {
    World w;
    w.add("a", credits(5));
    Event good = w.ledger.make_event(w.key("a"), 0, MarketAsk{1, {"x"}, 1});

    Event wrong_seq = good;
    wrong_seq.seq += 1;
    CHECK(code_of([&] { w.ledger.append(wrong_seq); }) == ErrorCode::ChainBreak);

    Event wrong_prev = good;
    wrong_prev.prev_hash.bytes[0] ^= 1;
    CHECK(code_of([&] { w.ledger.append(wrong_prev); }) == ErrorCode::ChainBreak);

    Event forged = good;
    forged.signature.bytes[0] ^= 1;
    CHECK(code_of([&] { w.ledger.append(forged); }) == ErrorCode::BadSignature);

    Event stranger = w.ledger.make_event(w.key("nobody"), 0, MarketAsk{1, {"x"}, 1});
    CHECK(code_of([&] { w.ledger.append(stranger); }) == ErrorCode::BadSignature);

    w.ledger.append(good);
    CHECK(w.ledger.size() == 4);
}

TEST_CASE("failed appends leave the ledger unchanged") {
    World w;
    w.add("a", credits(5));
    const ContentHash before = w.state().digest();
    const auto size = w.ledger.size();
    try {
        w.act("a", ReviewBid{content_hash(std::string_view{"missing"}), JournalId{}, 1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownEntity);
        CHECK(e.seq() == size);
    }
    CHECK(w.state().digest() == before);
    CHECK(w.ledger.size() == size);
}

TEST_CASE("genesis: mint only by the registrar and only before other events") {
    World w;
    w.add("a");
    CHECK(w.try_act("a", Mint{w.id("a"), 5}) == ErrorCode::PreconditionFailed);
    CHECK(w.try_act("registrar", Mint{w.id("nobody"), 5}) == ErrorCode::UnknownEntity);
    w.act("a", MarketAsk{1, {"x"}, 1});
    CHECK(w.try_act("registrar", Mint{w.id("a"), 5}) == ErrorCode::PreconditionFailed);
    CHECK(w.try_act("a", key_register(w.key("zz"), true)) == ErrorCode::PreconditionFailed);
    w.act("zz", key_register(w.key("zz"), false));
    CHECK_FALSE(w.state().keys().find(w.id("zz"))->validated);
}

TEST_CASE("timestamps never go backwards") {
    World w;
    w.day = 5;
    w.add("a");
    w.day = 4;
    CHECK(w.try_act("a", MarketAsk{1, {"x"}, 1}) == ErrorCode::PreconditionFailed);
}

TEST_CASE("serialised ledgers replay to the same state and detect corruption") {
    World w = sample_world();
    const Bytes bytes = w.ledger.serialize();
    Ledger back = Ledger::deserialize(bytes);
    CHECK(back.state().digest() == w.state().digest());
    CHECK(back.serialize() == bytes);
    CHECK(replay(w.ledger.events()).digest() == w.state().digest());

    for (std::size_t i = 0; i < bytes.size(); ++i) {
        Bytes bad = bytes;
        bad[i] ^= 0x01;
        auto code = code_of([&] { Ledger::deserialize(bad); });
        CAPTURE(i);
        CHECK(code == ErrorCode::ChainBreak);
    }
    Bytes truncated(bytes.begin(), bytes.end() - 1);
    CHECK(code_of([&] { Ledger::deserialize(truncated); }) == ErrorCode::ChainBreak);
}

TEST_CASE("save and load through a file") {
    World w = sample_world();
    auto path = std::filesystem::temp_directory_path() / "principia-ledger-test.bin";
    w.ledger.save(path);
    CHECK(Ledger::load(path).state().digest() == w.state().digest());
    std::filesystem::remove(path);
}
