#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "principia/digest.hpp"
#include "principia/money.hpp"

namespace principia {

struct ServiceInterval {
    PersonId person;
    JournalId journal;
    Day from_day = 0;
    Day to_day = 0;

    Day duration() const { return to_day - from_day; }
};

struct PublishedPaper {
    ContentHash hash;
    JournalId journal;
    Day published_day = 0;
};

struct Citation {
    ContentHash citing;
    ContentHash cited;
};

/// Everything the reputation scores depend on.
struct ReputationInput {
    std::map<JournalId, std::vector<PersonId>> boards;
    std::vector<PublishedPaper> papers;
    std::vector<Citation> citations;
    std::vector<ServiceInterval> intervals;
};

struct SolverOptions {
    double damping = 0.5;
    double tolerance = 1e-9;
    int max_iterations = 1000;
    double default_user_score = 1.0;
    /// Only citations from papers published within the last `window` days of
    /// `at_day` count. Unset means all time.
    std::optional<Day> citation_window;
    Day at_day = 0;
};

struct ReputationState {
    std::map<JournalId, double> journal_score;
    std::map<PersonId, double> user_score;
    std::map<JournalId, double> board_score;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Time-weighted mean of (duration, score) pairs; `fallback` when total duration is 0.
double time_weighted_score(std::span<const std::pair<Day, double>> service, double fallback = 1.0);

/// Mean of the given user scores; 0 for an empty board.
double board_score(std::span<const double> member_scores);

/// Citations into j's papers weighted by the board score of each citing
/// paper's journal, divided by j's paper count (0 with no papers).
double journal_score(const JournalId& journal, const ReputationInput& input,
                     const std::map<JournalId, double>& board_scores,
                     const SolverOptions& options = {});

/// Damped fixed-point iteration over the journal -> board -> user -> journal
/// recursion, starting from all-ones journal scores. Reports convergence
/// instead of throwing; on divergence the last finite iterate is returned.
ReputationState solve_fixed_point(const ReputationInput& input, const SolverOptions& options = {});

}  // namespace principia
