"""Python access to the principia protocol library and scenario engine."""

from ._principia import (
    Error,
    Ledger,
    Run,
    accepts,
    content_hash,
    format_credits,
    match_reviewers,
    parse_credits,
    person_id,
    simulate,
    split_review_fee,
    suggest_fair_bid,
    time_weighted_score,
)


def simulate_file(path, seed=None, check_invariants=False):
    """Runs the scenario file at `path`."""
    with open(path, encoding="utf-8") as f:
        return simulate(f.read(), seed=seed, check_invariants=check_invariants)


__all__ = [
    "Error",
    "Ledger",
    "Run",
    "accepts",
    "content_hash",
    "format_credits",
    "match_reviewers",
    "parse_credits",
    "person_id",
    "simulate",
    "simulate_file",
    "split_review_fee",
    "suggest_fair_bid",
    "time_weighted_score",
]
