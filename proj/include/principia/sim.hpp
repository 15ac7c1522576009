#pragma once

// Deterministic agent-based driver for the journal system and the minimal
// market. A scenario plus the engine version fully determines the ledger.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "principia/ledger.hpp"

namespace principia {

struct AgentSpec {
    std::string name;
    bool author = false;
    bool reviewer = false;
    bool board = false;  // may found, join and leave journals
    Micro wallet = 0;
    std::set<std::string> keywords;

    double submit_rate = 0.0;  // chance of writing a paper on a given day
    double quality_mean = 3.0;
    double quality_sd = 0.8;
    double market_share = 0.5;  // chance a paper goes to the market rather than a journal
    double bid_factor = 1.0;    // market bid as a multiple of the suggested fair bid
    Micro review_fee = 5 * kMicroPerUnit;

    Micro ask = kMicroPerUnit;
    std::uint32_t capacity = 2;
    double skill = 3.5;  // mean quality of the agent's review reports

    double accept_bias = 0.0;  // added to the board vote probability
    double join_rate = 0.0;
    Micro join_bid = 5 * kMicroPerUnit;
    double leave_rate = 0.0;
};

struct JournalSpec {
    std::string title;
    std::vector<std::string> founders;
    JournalParams params;
};

enum class ShockKind { ReviewerExit };

struct ShockSpec {
    Day day = 0;
    ShockKind kind = ShockKind::ReviewerExit;
    double fraction = 0.0;
};

struct Scenario {
    std::uint64_t seed = 1;
    Day horizon_days = 100;
    Day sample_every = 10;
    Scheme scheme = Scheme::TestHmac;
    bool check_invariants = false;
    /// Chance per agent-day of one random, usually invalid, action. Exercises
    /// the rejection paths in fuzz runs.
    double fault_rate = 0.0;
    ProtocolConfig config;
    std::vector<AgentSpec> agents;
    std::vector<JournalSpec> journals;
    std::vector<ShockSpec> shocks;

    /// Throws Error(Scenario) naming the source, line and field.
    static Scenario parse(std::string_view text, std::string source = "scenario");
    static Scenario load(const std::filesystem::path& path);
    void validate() const;
};

/// A small random scenario for property tests.
Scenario random_scenario(std::uint64_t seed);

struct MetricsRow {
    Day day = 0;
    int submitted = 0;  // review bids and market submissions in the window
    int accepted = 0;   // journal publications and market acceptances in the window
    double mean_review_fee = 0.0;
    double mean_market_fee = 0.0;  // sum of matched asks per match
    double mean_join_fee = 0.0;
    std::int64_t reviewer_supply = 0;  // spare market review slots
    double rs_p10 = 0.0, rs_p50 = 0.0, rs_p90 = 0.0;
    double mean_journal_score = 0.0;
    double mean_board_score = 0.0;
};

struct RunOptions {
    bool metrics = true;
    bool check_invariants = false;
    std::function<void(const Ledger&, const Event&)> on_event;
};

struct RunResult {
    Ledger ledger;
    std::vector<MetricsRow> metrics;
    std::uint64_t attempted = 0;
    std::map<std::string, std::uint64_t> rejected;  // by error code
};

RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// Tab-separated, one row per sample, with a header line.
std::string format_metrics(const std::vector<MetricsRow>& rows);
/// Key-value run summary, including the scenario settings for reproducibility.
std::string format_summary(const Scenario& scenario, const RunResult& result);

}  // namespace principia
