import os
import pathlib

import pytest

import principia

ROOT = pathlib.Path(__file__).resolve().parents[2]
DEMO = ROOT / "scenarios" / "demo.scn"

SMALL = """
[scenario]
seed = 3
horizon_days = 30
sample_every = 10

[agent]
name = ed
count = 4
roles = board, reviewer
wallet = 50
keywords = x

[agent]
name = au
count = 4
roles = author, reviewer
wallet = 50
keywords = x
submit_rate = 0.2

[journal]
title = J
founders = ed-1, ed-2, ed-3, ed-4
params = f=0.2,t=5,n=3
"""


def test_fee_split_is_exact():
    out = principia.split_review_fee(10_000_001, 0.2, [1, 4, 5])
    assert out["journal"] + sum(out["reviewers"]) + out["refund"] == 10_000_001
    assert all(r >= 0 for r in out["reviewers"])


def test_publication_rule():
    assert principia.accepts([4, 3, 3])
    assert not principia.accepts([3, 3, 3])


def test_user_score_worked_example():
    assert principia.time_weighted_score([(6, 10.0), (12, 5.0)]) == pytest.approx(20 / 3, abs=1e-9)


def test_matching_respects_budget():
    pool = [("a", 1_000_000, 5_000_000), ("b", 1_000_000, 1_000_000), ("c", 2_000_000, 9_000_000),
            ("d", 500_000, 2_000_000)]
    chosen = principia.match_reviewers(pool, 3_500_000)
    assert chosen is not None and len(chosen) == 3
    assert principia.match_reviewers(pool, 1_000_000) is None


def test_credit_round_trip():
    assert principia.parse_credits("12.5") == 12_500_000
    assert principia.format_credits(12_500_000) == "12.5"


def test_errors_carry_codes():
    with pytest.raises(principia.Error, match="^NOT_ENOUGH_REVIEWERS"):
        principia.suggest_fair_bid([1, 2])
    with pytest.raises(principia.Error, match="^SCENARIO"):
        principia.simulate("[weather]\n")


def test_simulation_is_deterministic_and_replays():
    a = principia.simulate(SMALL, check_invariants=True)
    b = principia.simulate(SMALL)
    assert a.ledger.to_bytes() == b.ledger.to_bytes()
    assert len(a.ledger) > 10
    assert a.ledger.replay_digest() == a.ledger.state_digest
    assert [r["day"] for r in a.metrics] == [9, 19, 29]
    assert principia.simulate(SMALL, seed=4).ledger.head != a.ledger.head


def test_ledger_round_trip_and_corruption(tmp_path):
    run = principia.simulate(SMALL)
    raw = run.ledger.to_bytes()
    path = tmp_path / "l.bin"
    path.write_bytes(raw)
    loaded = principia.Ledger.load(os.fspath(path))
    assert loaded.head == run.ledger.head
    bad = bytearray(raw)
    bad[len(bad) // 2] ^= 1
    with pytest.raises(principia.Error, match="^CHAIN_BREAK"):
        principia.Ledger.from_bytes(bytes(bad))


def test_demo_scenario_runs():
    run = principia.simulate_file(DEMO)
    assert "state_digest=" in run.summary()
    assert run.metrics_tsv().startswith("day\t")
