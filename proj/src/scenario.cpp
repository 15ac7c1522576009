#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "principia/rng.hpp"
#include "principia/sim.hpp"
#include "principia/textfmt.hpp"

namespace principia {

namespace {

constexpr ErrorCode kCode = ErrorCode::Scenario;

bool valid_name(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

void read_scenario(FieldReader& f, Scenario& s) {
    s.seed = static_cast<std::uint64_t>(f.integer("seed", 1, 0, INT64_MAX));
    s.horizon_days = f.integer("horizon_days", s.horizon_days, 1, 100'000);
    s.sample_every = f.integer("sample_every", s.sample_every, 1, 100'000);
    if (auto v = f.text("scheme")) {
        try {
            s.scheme = parse_scheme(*v);
        } catch (const Error& e) {
            f.fail_at(0, "scheme", e.what());
        }
    }
    s.check_invariants = f.flag("check_invariants", s.check_invariants);
    s.fault_rate = f.real("fault_rate", s.fault_rate, 0, 1);
    auto& c = s.config;
    c.join_expiry_days = f.integer("join_expiry_days", c.join_expiry_days, 1, 100'000);
    c.reviewers_per_submission =
        static_cast<std::uint32_t>(f.integer("reviewers_per_submission", c.reviewers_per_submission, 3, 50));
    c.report_threshold = f.credits("report_threshold", c.report_threshold);
    c.initial_rs = f.credits("initial_rs", c.initial_rs);
    c.ema_weight = f.fraction("ema_weight", c.ema_weight);
    if (auto v = f.text("rs_update")) {
        if (*v == "additive") c.rs_update = RsUpdate::Additive;
        else if (*v == "ema") c.rs_update = RsUpdate::MovingAverage;
        else f.fail_at(0, "rs_update", "expected 'additive' or 'ema'");
    }
}

std::vector<AgentSpec> read_agent(FieldReader& f) {
    AgentSpec a;
    const std::string name = f.required("name");
    const auto count = f.integer("count", 1, 1, 10'000);
    for (const auto& role : f.list("roles")) {
        if (role == "author") a.author = true;
        else if (role == "reviewer") a.reviewer = true;
        else if (role == "board") a.board = true;
        else f.fail_at(0, "roles", "unknown role '" + role + "' (author, reviewer, board)");
    }
    a.wallet = f.credits("wallet", a.wallet);
    for (const auto& k : f.list("keywords")) a.keywords.insert(k);
    a.submit_rate = f.real("submit_rate", a.submit_rate, 0, 1);
    a.quality_mean = f.real("quality_mean", a.quality_mean, 1, 5);
    a.quality_sd = f.real("quality_sd", a.quality_sd, 0, 5);
    a.market_share = f.real("market_share", a.market_share, 0, 1);
    a.bid_factor = f.real("bid_factor", a.bid_factor, 0, 100);
    a.review_fee = f.credits("review_fee", a.review_fee);
    a.ask = f.credits("ask", a.ask);
    a.capacity = static_cast<std::uint32_t>(f.integer("capacity", a.capacity, 0, 1000));
    a.skill = f.real("skill", a.skill, 1, 5);
    a.accept_bias = f.real("accept_bias", a.accept_bias, -1, 1);
    a.join_rate = f.real("join_rate", a.join_rate, 0, 1);
    a.join_bid = f.credits("join_bid", a.join_bid);
    a.leave_rate = f.real("leave_rate", a.leave_rate, 0, 1);

    std::vector<AgentSpec> out;
    for (std::int64_t i = 1; i <= count; ++i) {
        out.push_back(a);
        out.back().name = count == 1 ? name : fmt::format("{}-{}", name, i);
    }
    return out;
}

}  // namespace

Scenario Scenario::parse(std::string_view text, std::string source) {
    const TextDocument doc = parse_text(text, std::move(source), kCode);
    Scenario s;
    bool seen_header = false;
    for (const TextSection& sec : doc.sections) {
        FieldReader f(doc, sec, kCode);
        auto section_error = [&](const std::string& msg) {
            fail(kCode, fmt::format("{}:{}: [{}] {}", doc.source, sec.line, sec.name, msg));
        };
        if (sec.name == "scenario") {
            if (seen_header) section_error("section given twice");
            seen_header = true;
            read_scenario(f, s);
        } else if (sec.name == "thresholds") {
            for (const auto& e : f.entries()) {
                Micro v = 0;
                try {
                    v = parse_credits(e.value);
                } catch (const Error& err) {
                    f.fail_at(e.line, e.key, err.what());
                }
                if (e.key == "default") s.config.thresholds.default_points = v;
                else s.config.thresholds.by_field[e.key] = v;
            }
        } else if (sec.name == "agent") {
            for (auto& a : read_agent(f)) {
                if (!valid_name(a.name)) section_error("invalid agent name '" + a.name + "'");
                s.agents.push_back(std::move(a));
            }
        } else if (sec.name == "journal") {
            JournalSpec j;
            j.title = f.required("title");
            j.founders = f.list("founders");
            if (auto p = f.text("params")) {
                try {
                    j.params = JournalParams::parse(*p);
                    j.params.validate();
                } catch (const Error& e) {
                    f.fail_at(sec.line, "params", e.what());
                }
            }
            s.journals.push_back(std::move(j));
        } else if (sec.name == "shock") {
            ShockSpec sh;
            sh.day = f.integer("day", 0, 0, 100'000);
            const std::string kind = f.required("kind");
            if (kind != "reviewer_exit") f.fail_at(sec.line, "kind", "unknown shock '" + kind + "' (reviewer_exit)");
            sh.fraction = f.real("fraction", 0.5, 0, 1);
            s.shocks.push_back(sh);
        } else {
            section_error("unknown section");
        }
        f.finish();
    }
    try {
        s.validate();
    } catch (const Error& e) {
        fail(kCode, doc.source + ": " + e.what());
    }
    return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path.string());
}

void Scenario::validate() const {
    try {
        config.validate();
    } catch (const Error& e) {
        fail(kCode, e.what());
    }
    std::map<std::string, const AgentSpec*> by_name;
    for (const auto& a : agents) {
        require(by_name.emplace(a.name, &a).second, kCode, "agent '" + a.name + "' defined twice");
    }
    std::set<std::string> titles;
    for (const auto& j : journals) {
        require(titles.insert(j.title).second, kCode, "journal '" + j.title + "' defined twice");
        require(!j.founders.empty(), kCode, "journal '" + j.title + "' has no founders");
        for (const auto& f : j.founders) {
            auto it = by_name.find(f);
            require(it != by_name.end(), kCode, "journal '" + j.title + "': unknown founder '" + f + "'");
            require(it->second->board, kCode, "journal '" + j.title + "': founder '" + f + "' lacks the board role");
        }
    }
}

Scenario random_scenario(std::uint64_t seed) {
    Rng rng(seed);
    Scenario s;
    s.seed = seed;
    s.horizon_days = 10 + static_cast<Day>(rng.below(31));
    s.sample_every = 5;
    const std::vector<std::string> topics{"x", "y", "z"};
    const std::size_t n_agents = rng.below(11);
    for (std::size_t i = 0; i < n_agents; ++i) {
        AgentSpec a;
        a.name = fmt::format("a{}", i);
        a.author = rng.bernoulli(0.7);
        a.reviewer = rng.bernoulli(0.7);
        a.board = rng.bernoulli(0.6);
        a.wallet = static_cast<Micro>(rng.below(200)) * kMicroPerUnit + static_cast<Micro>(rng.below(1000));
        for (const auto& t : topics) {
            if (rng.bernoulli(0.5)) a.keywords.insert(t);
        }
        if (a.keywords.empty()) a.keywords.insert(topics[rng.below(topics.size())]);
        a.submit_rate = rng.uniform() * 0.4;
        a.quality_mean = 1.0 + 4.0 * rng.uniform();
        a.market_share = rng.uniform();
        a.bid_factor = 0.5 + rng.uniform();
        a.review_fee = static_cast<Micro>(rng.below(10'000'000));
        a.ask = static_cast<Micro>(rng.below(5'000'000));
        a.capacity = static_cast<std::uint32_t>(rng.below(4));
        a.skill = 1.0 + 4.0 * rng.uniform();
        a.accept_bias = rng.uniform() - 0.5;
        a.join_rate = rng.uniform() * 0.1;
        a.join_bid = static_cast<Micro>(rng.below(10'000'000));
        a.leave_rate = rng.uniform() * 0.05;
        s.agents.push_back(std::move(a));
    }
    std::vector<std::string> board_names;
    for (const auto& a : s.agents) {
        if (a.board) board_names.push_back(a.name);
    }
    const std::size_t n_journals = board_names.empty() ? 0 : rng.below(4);
    for (std::size_t j = 0; j < n_journals; ++j) {
        JournalSpec spec;
        spec.title = fmt::format("journal-{}", j);
        std::set<std::string> founders;
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(4, board_names.size()));
        while (founders.size() < k) founders.insert(board_names[rng.below(board_names.size())]);
        spec.founders.assign(founders.begin(), founders.end());
        JournalParams& p = spec.params;
        p.keep_fraction = Fraction{static_cast<std::uint32_t>(rng.below(1'000'001))};
        p.anonymous_reviewers = rng.bernoulli(0.5);
        p.max_review_days = 1 + static_cast<std::uint32_t>(rng.below(20));
        p.reviewers_per_paper = 1 + static_cast<std::uint32_t>(rng.below(3));
        p.review_quorum = Fraction{1 + static_cast<std::uint32_t>(rng.below(1'000'000))};
        p.spend_quorum = Fraction{1 + static_cast<std::uint32_t>(rng.below(999'999))};
        p.modify_quorum = Fraction{p.spend_quorum.ppm + 1 +
                                   static_cast<std::uint32_t>(rng.below(1'000'000 - p.spend_quorum.ppm))};
        s.journals.push_back(std::move(spec));
    }
    s.fault_rate = rng.bernoulli(0.5) ? 0.05 : 0.0;
    if (rng.bernoulli(0.3)) {
        s.shocks.push_back({static_cast<Day>(rng.below(static_cast<std::uint64_t>(s.horizon_days))),
                            ShockKind::ReviewerExit, rng.uniform()});
    }
    s.validate();
    return s;
}

}  // namespace principia
