#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "principia/rng.hpp"
#include "principia/sim.hpp"
#include "support.hpp"

using namespace principia;

namespace {

std::string demo_text() {
    std::ifstream is(PRINCIPIA_SOURCE_DIR "/scenarios/demo.scn");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kSmall = R"(
[scenario]
seed = 7
horizon_days = 40
sample_every = 10
check_invariants = true

[agent]
name = ed
count = 4
roles = board, reviewer
wallet = 100
keywords = x

[agent]
name = au
count = 5
roles = author, reviewer
wallet = 100
keywords = x
submit_rate = 0.2

[journal]
title = J
founders = ed-1, ed-2, ed-3, ed-4
params = f=0.2,t=5,n=3
)";

}  // namespace

TEST_CASE("scenario parses the demo file") {
    Scenario s = Scenario::parse(demo_text(), "demo.scn");
    CHECK(s.seed == 42);
    CHECK(s.agents.size() == 21);
    CHECK(s.journals.size() == 2);
    CHECK(s.shocks.size() == 1);
    CHECK(s.config.thresholds.by_field.at("physics") == 3'200'000);
    CHECK(s.journals[1].params.reviewers_per_paper == 2);
}

TEST_CASE("scenario diagnostics name line and field") {
    auto message = [](const std::string& text) -> std::string {
        try {
            Scenario::parse(text, "bad.scn");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Scenario);
            return e.what();
        }
        return "";
    };
    CHECK(message("[scenario]\nhorizon_days = -3\n").find("bad.scn:2") != std::string::npos);
    CHECK(message("[scenario]\nhorizon_days = -3\n").find("horizon_days") != std::string::npos);
    CHECK(message("[scenario]\nunknown_key = 1\n").find("unknown_key") != std::string::npos);
    CHECK(message("[agent]\nname = a\nroles = pilot\n").find("roles") != std::string::npos);
    CHECK(message("[weather]\n").find("unknown section") != std::string::npos);
    CHECK(message("[journal]\ntitle = J\nfounders = ghost\n").find("ghost") != std::string::npos);
    CHECK(message("[agent]\nname = a\n[agent]\nname = a\n").find("twice") != std::string::npos);
    CHECK(message("[journal]\ntitle = J\nparams = n=0\n").find("params") != std::string::npos);
}

TEST_CASE("split_rng streams are stable and independent") {
    Rng a1 = split_rng(5, "alice", 3);
    Rng a2 = split_rng(5, "alice", 3);
    for (int i = 0; i < 10; ++i) CHECK(a1.next() == a2.next());
    CHECK(split_rng(5, "alice", 3).next() != split_rng(5, "alice", 4).next());

    // Distinct agents collide on the first draw essentially never.
    int collisions = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        collisions += split_rng(seed, "alice", 0).next() == split_rng(seed, "bob", 0).next();
    }
    CHECK(collisions == 0);
}

TEST_CASE("adding an agent leaves other agents' streams alone") {
    Scenario s = Scenario::parse(kSmall);
    RunOptions o;
    o.metrics = false;
    // Stream draws are keyed by name only, so the sequence for ed-1 on day 3
    // is the same whatever the population.
    const auto before = split_rng(s.seed, "ed-1", 3).next();
    s.agents.push_back(s.agents.back());
    s.agents.back().name = "late";
    CHECK(split_rng(s.seed, "ed-1", 3).next() == before);
    CHECK_NOTHROW(run(s, o));
}

TEST_CASE("same scenario twice gives byte-identical ledgers") {
    Scenario s = Scenario::parse(kSmall);
    RunResult a = run(s);
    RunResult b = run(s);
    CHECK(a.ledger.size() > 50);
    CHECK(a.ledger.serialize() == b.ledger.serialize());
    CHECK(format_metrics(a.metrics) == format_metrics(b.metrics));
    CHECK(a.metrics.size() == 4);
    // Something actually happened in both systems.
    CHECK_FALSE(a.ledger.state().rounds().empty());
    CHECK_FALSE(a.ledger.state().submissions().empty());
}

TEST_CASE("zero agents leaves only the genesis registration") {
    Scenario s;
    s.horizon_days = 30;
    RunResult r = run(s);
    REQUIRE(r.ledger.size() == 1);
    CHECK(r.ledger.events()[0].kind() == EventKind::KeyRegister);
    CHECK(r.metrics.size() == 3);
}

TEST_CASE("replay of a simulated ledger reproduces its state") {
    Scenario s = Scenario::parse(kSmall);
    RunResult r = run(s);
    State replayed = replay(r.ledger.events(), r.ledger.config());
    CHECK(replayed.digest() == r.ledger.state().digest());
    Ledger back = Ledger::deserialize(r.ledger.serialize());
    CHECK(back.state().digest() == r.ledger.state().digest());
}

TEST_CASE("random scenarios keep every invariant") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Scenario s = random_scenario(seed);
        RunOptions o;
        o.check_invariants = true;
        o.metrics = false;
        CHECK_NOTHROW(run(s, o));
    }
}

// Regression snapshot on the pinned demo seed, not ground truth: after half
// the reviewers leave, the market pays more per match.
TEST_CASE("reviewer exit raises the matched fee in the demo") {
    Scenario s = Scenario::parse(demo_text(), "demo.scn");
    RunResult r = run(s);
    double before = 0, after = 0;
    int nb = 0, na = 0;
    for (const MetricsRow& m : r.metrics) {
        if (m.mean_market_fee == 0) continue;
        if (m.day < 50) before += m.mean_market_fee, ++nb;
        else after += m.mean_market_fee, ++na;
    }
    REQUIRE(nb > 0);
    REQUIRE(na > 0);
    CHECK(after / na >= before / nb);
}
