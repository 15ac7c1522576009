// Python bindings: the pure protocol functions, ledger loading and the
// scenario engine. Errors surface as principia.Error("CODE: message").

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "principia/error.hpp"
#include "principia/market.hpp"
#include "principia/review.hpp"
#include "principia/sim.hpp"

namespace py = pybind11;
using namespace principia;

namespace {

py::dict metrics_row(const MetricsRow& m) {
    py::dict d;
    d["day"] = m.day;
    d["submitted"] = m.submitted;
    d["accepted"] = m.accepted;
    d["mean_review_fee"] = m.mean_review_fee;
    d["mean_market_fee"] = m.mean_market_fee;
    d["mean_join_fee"] = m.mean_join_fee;
    d["reviewer_supply"] = m.reviewer_supply;
    d["rs_p10"] = m.rs_p10;
    d["rs_p50"] = m.rs_p50;
    d["rs_p90"] = m.rs_p90;
    d["journal_score"] = m.mean_journal_score;
    d["board_score"] = m.mean_board_score;
    return d;
}

py::bytes to_py(const Bytes& b) { return {reinterpret_cast<const char*>(b.data()), b.size()}; }

Bytes from_py(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

struct PyRun {
    Scenario scenario;
    RunResult result;
};

}  // namespace

PYBIND11_MODULE(_principia, m) {
    m.doc() = "Signed-ledger journals, review market and reputation scores";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            std::string msg = std::string(code_name(e.code())) + ": " + e.what();
            if (e.seq()) msg += " (seq=" + std::to_string(*e.seq()) + ")";
            error(msg.c_str());
        }
    });

    m.def("content_hash", [](const py::bytes& b) { return content_hash(from_py(b)).hex(); },
          "SHA-256 of the bytes, as hex");
    m.def("person_id", [](const std::string& label, const std::string& scheme) {
        return keygen_from_label(label, parse_scheme(scheme)).id().hex();
    }, py::arg("label"), py::arg("scheme") = "ed25519", "fingerprint of the key derived from a label");

    m.def("parse_credits", [](const std::string& s) { return parse_credits(s); });
    m.def("format_credits", [](Micro v) { return format_credits(v); });

    m.def("split_review_fee", [](Micro fee, double keep, const std::vector<int>& scores) {
        const Payout p = split_review_fee(fee, Fraction::from_double(keep), scores);
        py::dict d;
        d["reviewers"] = p.reviewer_amounts;
        d["journal"] = p.journal_share;
        d["refund"] = p.refund_to_authors;
        return d;
    }, py::arg("fee"), py::arg("keep_fraction"), py::arg("scores"),
       "Integer fee split; amounts in micro-credits sum to fee exactly");
    m.def("accepts", [](const std::vector<int>& scores) { return decide_publication(scores) == Decision::Accept; },
          "True iff the mean score is above 3");

    m.def("match_reviewers", [](const std::vector<std::tuple<std::string, Micro, RsPoints>>& pool, Micro budget,
                                std::size_t n) -> std::optional<std::vector<std::string>> {
        std::vector<Candidate> cands;
        std::map<PersonId, std::string> names;
        for (const auto& [name, ask, rs] : pool) {
            const PersonId id = PersonId::from(content_hash(name));
            names[id] = name;
            cands.push_back({id, ask, rs});
        }
        auto chosen = match_reviewers(cands, budget, n);
        if (!chosen) return std::nullopt;
        std::vector<std::string> out;
        for (const PersonId& id : *chosen) out.push_back(names.at(id));
        std::sort(out.begin(), out.end());
        return out;
    }, py::arg("pool"), py::arg("budget"), py::arg("n") = 3,
       "pool: (name, ask_micro, rs_points) tuples; returns the chosen names or None");
    m.def("suggest_fair_bid", [](const std::vector<Micro>& asks) { return suggest_fair_bid(asks); });

    m.def("time_weighted_score", [](const std::vector<std::pair<Day, double>>& service, double fallback) {
        return time_weighted_score(service, fallback);
    }, py::arg("service"), py::arg("fallback") = 1.0);

    py::class_<Ledger>(m, "Ledger")
        .def_static("load", &Ledger::load, "load and fully verify a ledger file")
        .def_static("from_bytes", [](const py::bytes& b) { return Ledger::deserialize(from_py(b)); })
        .def("__len__", &Ledger::size)
        .def_property_readonly("head", [](const Ledger& l) { return l.head().hex(); })
        .def_property_readonly("state_digest", [](const Ledger& l) { return l.state().digest().hex(); })
        .def("to_bytes", [](const Ledger& l) { return to_py(l.serialize()); })
        .def("render_text", &Ledger::render_text)
        .def("replay_digest", [](const Ledger& l) { return replay(l.events(), l.config()).digest().hex(); })
        .def("total_balance", [](const Ledger& l) { return l.state().total_balance(); })
        .def("check_invariants", [](const Ledger& l) { l.state().check_invariants(); });

    py::class_<PyRun>(m, "Run")
        .def_property_readonly("ledger", [](const PyRun& r) { return r.result.ledger; })
        .def_property_readonly("metrics", [](const PyRun& r) {
            py::list out;
            for (const MetricsRow& row : r.result.metrics) out.append(metrics_row(row));
            return out;
        })
        .def_property_readonly("rejected", [](const PyRun& r) { return r.result.rejected; })
        .def("summary", [](const PyRun& r) { return format_summary(r.scenario, r.result); })
        .def("metrics_tsv", [](const PyRun& r) { return format_metrics(r.result.metrics); });

    m.def("simulate", [](const std::string& text, std::optional<std::uint64_t> seed, bool check_invariants) {
        PyRun r;
        r.scenario = Scenario::parse(text, "scenario");
        if (seed) r.scenario.seed = *seed;
        RunOptions o;
        o.check_invariants = check_invariants || r.scenario.check_invariants;
        {
            py::gil_scoped_release release;
            r.result = run(r.scenario, o);
        }
        return r;
    }, py::arg("scenario_text"), py::arg("seed") = py::none(), py::arg("check_invariants") = false,
       "run a scenario given as text");
}
