#include "principia/reputation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace principia {

double time_weighted_score(std::span<const std::pair<Day, double>> service, double fallback) {
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& [duration, score] : service) {
        if (duration <= 0) continue;
        weighted += static_cast<double>(duration) * score;
        total += static_cast<double>(duration);
    }
    return total > 0.0 ? weighted / total : fallback;
}

double board_score(std::span<const double> member_scores) {
    if (member_scores.empty()) return 0.0;
    return std::accumulate(member_scores.begin(), member_scores.end(), 0.0) /
           static_cast<double>(member_scores.size());
}

namespace {

// Citation graph reduced to what the recursion needs: for each journal, its
// paper count and the journals of the papers citing into it (one entry per
// citation).
struct Graph {
    std::map<JournalId, std::size_t> paper_count;
    std::map<JournalId, std::vector<JournalId>> cited_by;
};

Graph build_graph(const ReputationInput& input, const SolverOptions& options) {
    Graph g;
    std::map<ContentHash, const PublishedPaper*> by_hash;
    for (const PublishedPaper& p : input.papers) {
        by_hash[p.hash] = &p;
        ++g.paper_count[p.journal];
    }
    for (const Citation& c : input.citations) {
        auto citing = by_hash.find(c.citing);
        auto cited = by_hash.find(c.cited);
        // Citations to or from unpublished hashes carry no weight.
        if (citing == by_hash.end() || cited == by_hash.end()) continue;
        if (options.citation_window &&
            citing->second->published_day < options.at_day - *options.citation_window) {
            continue;
        }
        g.cited_by[cited->second->journal].push_back(citing->second->journal);
    }
    return g;
}

double score_of(const JournalId& j, const Graph& g, const std::map<JournalId, double>& boards) {
    auto count = g.paper_count.find(j);
    if (count == g.paper_count.end() || count->second == 0) return 0.0;
    double sum = 0.0;
    if (auto it = g.cited_by.find(j); it != g.cited_by.end()) {
        for (const JournalId& citing : it->second) {
            auto b = boards.find(citing);
            sum += b == boards.end() ? 0.0 : b->second;
        }
    }
    return sum / static_cast<double>(count->second);
}

struct Solver {
    const ReputationInput& input;
    const SolverOptions& options;
    Graph graph;
    std::vector<JournalId> journals;
    std::set<PersonId> persons;

    Solver(const ReputationInput& in, const SolverOptions& opt) : input(in), options(opt) {
        graph = build_graph(in, opt);
        std::set<JournalId> js;
        for (const auto& [j, board] : in.boards) {
            js.insert(j);
            persons.insert(board.begin(), board.end());
        }
        for (const auto& p : in.papers) js.insert(p.journal);
        for (const auto& iv : in.intervals) {
            js.insert(iv.journal);
            persons.insert(iv.person);
        }
        journals.assign(js.begin(), js.end());
    }

    std::map<PersonId, double> users(const std::map<JournalId, double>& jscore) const {
        std::map<PersonId, std::vector<std::pair<Day, double>>> service;
        for (const ServiceInterval& iv : input.intervals) {
            auto it = jscore.find(iv.journal);
            service[iv.person].emplace_back(iv.duration(), it == jscore.end() ? 0.0 : it->second);
        }
        std::map<PersonId, double> out;
        for (const PersonId& p : persons) {
            auto it = service.find(p);
            out[p] = it == service.end() ? options.default_user_score
                                         : time_weighted_score(it->second, options.default_user_score);
        }
        return out;
    }

    std::map<JournalId, double> boards(const std::map<PersonId, double>& uscore) const {
        std::map<JournalId, double> out;
        for (const JournalId& j : journals) {
            std::vector<double> scores;
            if (auto it = input.boards.find(j); it != input.boards.end()) {
                for (const PersonId& p : it->second) scores.push_back(uscore.at(p));
            }
            out[j] = board_score(scores);
        }
        return out;
    }
};

}  // namespace

double journal_score(const JournalId& journal, const ReputationInput& input,
                     const std::map<JournalId, double>& board_scores, const SolverOptions& options) {
    return score_of(journal, build_graph(input, options), board_scores);
}

ReputationState solve_fixed_point(const ReputationInput& input, const SolverOptions& options) {
    Solver solver(input, options);
    std::map<JournalId, double> j;
    for (const JournalId& id : solver.journals) j[id] = 1.0;

    ReputationState st;
    const double alpha = options.damping;
    while (st.iterations < options.max_iterations) {
        ++st.iterations;
        auto b = solver.boards(solver.users(j));
        std::map<JournalId, double> next;
        double residual = 0.0;
        bool finite = true;
        for (const JournalId& id : solver.journals) {
            double target = score_of(id, solver.graph, b);
            double v = alpha * target + (1.0 - alpha) * j[id];
            if (!std::isfinite(v) || std::abs(v) > 1e150) finite = false;
            residual = std::max(residual, std::abs(v - j[id]));
            next[id] = v;
        }
        if (!finite) {
            st.residual = std::numeric_limits<double>::infinity();
            break;
        }
        j = std::move(next);
        st.residual = residual;
        if (residual < options.tolerance) {
            st.converged = true;
            break;
        }
    }
    // Users and boards are derived from the returned journal scores so the
    // three maps are mutually consistent.
    st.user_score = solver.users(j);
    st.board_score = solver.boards(st.user_score);
    st.journal_score = std::move(j);
    return st;
}

}  // namespace principia
