// principia: command-line front end to the ledger, the journal and market
// protocols, the reputation solver and the scenario engine.
//
// Exit codes: 0 ok, 1 domain error, 2 usage error. Errors go to stderr as
// `ERROR <CODE>: message`.

#include <fmt/format.h>
#include <sodium.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "principia/client.hpp"
#include "principia/error.hpp"
#include "principia/sim.hpp"
#include "workspace.hpp"

using namespace principia;
using namespace principia::cli;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string data = "principia-data";
    std::optional<std::string> config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> as;
    std::optional<Day> day;
    bool dry_run = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lazily opened, locked workspace shared by every command.
class Context {
public:
    explicit Context(const Globals& g) : g_(g) {}

    Config config() const {
        std::optional<fs::path> file;
        if (g_.config_file) file = *g_.config_file;
        return Config::load(g_.data, file);
    }

    Workspace& ws() {
        if (!ws_) {
            ws_.emplace(config());
            ws_->lock();
        }
        return *ws_;
    }
    Ledger& ledger() { return ws().ledger(); }
    const State& state() { return ledger().state(); }

    Day day() { return g_.day ? *g_.day : state().now(); }
    bool dry_run() const { return g_.dry_run; }

    /// `--as`, else the given default, else a usage error.
    KeyPair actor(const std::optional<std::string>& fallback = std::nullopt) {
        if (g_.as) return ws().key(*g_.as);
        if (fallback) return ws().key(*fallback);
        throw UsageError("this command needs --as NAME");
    }
    KeyPair actor_for(const PersonId& id) {
        if (g_.as) return ws().key(*g_.as);
        const std::string name = ws().name_of(id);
        if (ws().has_key(name)) return ws().key(name);
        throw UsageError("no local key for " + id.short_hex() + "; pass --as NAME");
    }

    std::vector<KeyPair> keys(const std::vector<std::string>& names) {
        std::vector<KeyPair> out;
        for (const auto& n : names) out.push_back(ws().key(n));
        return out;
    }

    /// Appends (or only checks, under --dry-run) and reports the event.
    void post(const KeyPair& actor, EventBody body) {
        Event e = ledger().make_event(actor, day(), std::move(body));
        if (g_.dry_run) {
            ledger().check(e);
            fmt::print("dry-run ok {}\n", e.describe());
            return;
        }
        const Event& done = ledger().append(std::move(e));
        ws().save();
        fmt::print("appended seq={} kind={} hash={}\n", done.seq, kind_name(done.kind()), done.hash().hex());
    }

    JournalId journal(const std::string& ref) {
        for (const auto& [id, rec] : state().journals()) {
            if (rec.live() && rec.journal.title == ref) return id;
        }
        return resolve(state().journals(), ref, "journal");
    }
    /// Follows descendants to the live snapshot.
    JournalId live_journal(const std::string& ref) {
        JournalId id = journal(ref);
        while (state().journal(id).descendant) id = *state().journal(id).descendant;
        return id;
    }
    ContentHash paper(const std::string& ref) {
        if (fs::is_regular_file(ref)) {
            std::ifstream is(ref, std::ios::binary);
            Bytes bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
            return content_hash(bytes);
        }
        return resolve(state().papers(), ref, "paper");
    }
    /// A round id (prefix) or a paper (file or hash prefix); a paper means its latest round.
    RoundId round(const std::string& ref) {
        if (auto h = paper_ref(ref)) {
            std::optional<RoundId> found;
            std::uint64_t best = 0;
            for (const auto& [id, r] : state().rounds()) {
                if (r.paper == *h && (!found || r.created_seq > best)) found = id, best = r.created_seq;
            }
            require(found.has_value(), ErrorCode::UnknownEntity, "paper has no review round");
            return *found;
        }
        return resolve(state().rounds(), ref, "round");
    }
    SubmissionId submission(const std::string& ref) {
        if (auto h = paper_ref(ref)) {
            std::optional<SubmissionId> found;
            std::uint64_t best = 0;
            for (const auto& [id, sub] : state().submissions()) {
                if (sub.paper == *h && (!found || sub.created_seq > best)) found = id, best = sub.created_seq;
            }
            require(found.has_value(), ErrorCode::UnknownEntity, "paper has no market submission");
            return *found;
        }
        return resolve(state().submissions(), ref, "submission");
    }

    std::string name(const PersonId& id) { return ws().name_of(id); }

private:
    /// The paper `ref` names, when it is a file or a unique paper hash prefix.
    std::optional<ContentHash> paper_ref(const std::string& ref) {
        if (fs::is_regular_file(ref)) return paper(ref);
        std::optional<ContentHash> found;
        if (ref.size() < 4) return found;
        for (const auto& [h, p] : state().papers()) {
            if (h.hex().rfind(ref, 0) != 0) continue;
            if (found) return std::nullopt;
            found = h;
        }
        return found;
    }

    const Globals& g_;
    std::optional<Workspace> ws_;
};

Micro credits(const std::string& text) {
    try {
        return parse_credits(text);
    } catch (const Error& e) {
        throw UsageError(fmt::format("bad amount '{}': {}", text, e.what()));
    }
}

std::uint8_t score_arg(int s) {
    require(s >= 0 && s <= 255, ErrorCode::ScoreOutOfRange, fmt::format("score {} is out of range", s));
    return static_cast<std::uint8_t>(s);
}

std::set<std::string> to_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(os), ErrorCode::Io, "cannot write " + path.string());
    os << text;
}

/// Stores a report from a file, or a short literal text, as a blob.
ContentHash blob_arg(Context& ctx, const std::string& arg) {
    if (fs::is_regular_file(arg)) return ctx.ws().put_file(arg);
    return ctx.ws().put_blob(as_bytes(arg));
}

std::string join_names(Context& ctx, const auto& ids) {
    std::string out;
    for (const PersonId& id : ids) {
        if (!out.empty()) out += ',';
        out += ctx.name(id);
    }
    return out.empty() ? "-" : out;
}

std::string join_set(const std::set<std::string>& s) {
    std::string out;
    for (const auto& x : s) out += (out.empty() ? "" : ",") + x;
    return out.empty() ? "-" : out;
}


// --- keys and money ----------------------------------------------------------

void cmd_keygen(Context& ctx, const std::string& name, const std::string& scheme_text,
                const std::optional<std::string>& label, bool validated) {
    const Scheme scheme = parse_scheme(scheme_text);
    KeyPair key;
    if (label) {
        key = keygen_from_label(*label, scheme);
    } else {
        Seed seed;
        randombytes_buf(seed.data(), seed.size());
        key = keygen(seed, scheme);
    }
    Workspace& ws = ctx.ws();
    require(!ws.has_key(name), ErrorCode::Duplicate, "key '" + name + "' already exists");
    // The first key becomes the registrar. Later keys are registered by the
    // registrar when its key is local, otherwise by themselves, unvalidated.
    const auto registrar = ctx.state().registrar();
    if (!registrar) {
        ctx.post(key, key_register(key, true));
    } else if (ws.has_key(ws.name_of(*registrar))) {
        ctx.post(ws.key(ws.name_of(*registrar)), key_register(key, validated));
    } else {
        require(!validated, ErrorCode::PreconditionFailed, "only the registrar may mark a key validated");
        ctx.post(key, key_register(key, false));
    }
    if (!ctx.dry_run()) ws.save_key(name, key);
    fmt::print("key name={} id={} scheme={}\n", name, key.id().hex(), scheme_name(scheme));
}

void cmd_mint(Context& ctx, const std::string& who, const std::string& amount) {
    const auto registrar = ctx.state().registrar();
    require(registrar.has_value(), ErrorCode::PreconditionFailed, "no registrar yet; run keygen first");
    ctx.post(ctx.actor_for(*registrar), Mint{ctx.ws().person(who), credits(amount)});
}

// --- journals ----------------------------------------------------------------

void print_journal(Context& ctx, const JournalId& id) {
    const JournalRecord& rec = ctx.state().journal(id);
    const Journal& j = rec.journal;
    fmt::print("journal {}\n", id.hex());
    fmt::print("  title     {}\n", j.title);
    fmt::print("  status    {}\n", rec.live() ? "live" : "superseded by " + rec.descendant->short_hex());
    fmt::print("  ancestor  {}\n", j.ancestor ? j.ancestor->hex() : "-");
    fmt::print("  created   day {}\n", j.created_at);
    fmt::print("  params    {}\n", j.params.str());
    fmt::print("  board     {}\n", join_names(ctx, j.board));
    fmt::print("  balance   {}\n", format_credits(ctx.state().balance(Owner::journal(id))));
    fmt::print("  papers    {}\n", rec.publications.size());
    if (rec.pending_join) {
        fmt::print("  pending   {} bid={} day={}\n", ctx.name(rec.pending_join->candidate),
                   format_credits(rec.pending_join->bid), rec.pending_join->bid_day);
    }
}

void list_journals(Context& ctx) {
    fmt::print("{:<12}  {:<5}  {:>5}  {:>12}  {:>6}  {}\n", "id", "live", "board", "balance", "papers", "title");
    for (const auto& [id, rec] : ctx.state().journals()) {
        fmt::print("{:<12}  {:<5}  {:>5}  {:>12}  {:>6}  {}\n", id.short_hex(), rec.live() ? "yes" : "no",
                   rec.journal.board.size(), format_credits(ctx.state().balance(Owner::journal(id))),
                   rec.publications.size(), rec.journal.title);
    }
}

// --- papers and rounds -------------------------------------------------------

void print_paper(Context& ctx, const ContentHash& h) {
    const PaperRecord& p = ctx.state().paper(h);
    fmt::print("paper {}\n", h.hex());
    fmt::print("  authors    {}\n", join_names(ctx, p.authors));
    fmt::print("  keywords   {}\n", join_set(p.keywords));
    fmt::print("  registered day {}\n", p.registered_at);
    fmt::print("  cites      {}\n", p.cites.size());
    for (const ContentHash& c : p.cites) fmt::print("    {}\n", c.hex());
    fmt::print("  published  {}\n", p.published_in ? fmt::format("{} day {}", p.published_in->short_hex(), p.published_at)
                                                   : std::string("-"));
    if (p.active_round) fmt::print("  round      {}\n", p.active_round->hex());
    if (p.market_submission) fmt::print("  submission {}\n", p.market_submission->hex());
    fmt::print("  blob       {}\n", ctx.ws().get_blob(h) ? "stored" : "missing");
}

void print_round(Context& ctx, const RoundId& id) {
    const ReviewRound& r = ctx.state().round(id);
    const bool anonymous = ctx.state().journal(r.journal).journal.params.anonymous_reviewers;
    std::optional<ContentHash> salt;
    auto who = [&](const PersonId& p) {
        if (!anonymous) return ctx.name(p);
        if (!salt) salt = ctx.ws().pseudonym_salt();
        return "anon:" + pseudonym(p, r.paper, r.id, *salt).short_hex();
    };
    fmt::print("round {}\n", id.hex());
    fmt::print("  paper     {}\n", r.paper.hex());
    fmt::print("  journal   {} ({})\n", r.journal.short_hex(), ctx.state().journal(r.journal).journal.title);
    fmt::print("  submitter {}\n", ctx.name(r.submitter));
    fmt::print("  fee       {}\n", format_credits(r.fee));
    fmt::print("  status    {}\n", status_name(r.status));
    fmt::print("  deadline  day {}\n", r.deadline);
    for (const PersonId& p : r.reviewers) {
        auto s = r.scores.find(p);
        auto v = r.final_votes.find(p);
        fmt::print("  reviewer  {} score={} final_vote={}\n", who(p),
                   s == r.scores.end() ? "-" : std::to_string(s->second),
                   v == r.final_votes.end() ? "-" : (v->second ? "approve" : "reject"));
    }
    if (r.decision) fmt::print("  decision  {}\n", *r.decision == Decision::Accept ? "accept" : "reject");
    if (r.final_version) fmt::print("  final     {}\n", r.final_version->hex());
    fmt::print("  published {}\n", r.published ? "yes" : "no");
    if (r.payout) {
        fmt::print("  payout    journal={} refund={}\n", format_credits(r.payout->journal_share),
                   format_credits(r.payout->refund_to_authors));
        std::size_t i = 0;
        for (const auto& [p, s] : r.scores) {
            if (i < r.payout->reviewer_amounts.size()) {
                fmt::print("  paid      {} {}\n", who(p), format_credits(r.payout->reviewer_amounts[i]));
            }
            ++i;
        }
    }
    if (!r.note.empty()) fmt::print("  note      {}\n", r.note);
}

void list_rounds(Context& ctx) {
    fmt::print("{:<12}  {:<12}  {:<12}  {:<18}  {:>10}\n", "round", "paper", "journal", "status", "fee");
    for (const auto& [id, r] : ctx.state().rounds()) {
        fmt::print("{:<12}  {:<12}  {:<12}  {:<18}  {:>10}\n", id.short_hex(), r.paper.short_hex(),
                   r.journal.short_hex(), status_name(r.status), format_credits(r.fee));
    }
}

// --- market ------------------------------------------------------------------

std::optional<std::vector<PersonId>> feasible_match(const State& s, const MarketSubmission& sub) {
    auto pool = s.eligible_candidates(sub.keywords, s.paper(sub.paper).authors);
    return match_reviewers(pool, sub.bid, s.config().reviewers_per_submission);
}

void print_submission(Context& ctx, const SubmissionId& id) {
    const MarketSubmission& s = ctx.state().submission(id);
    fmt::print("submission {}\n", id.hex());
    fmt::print("  paper     {}\n", s.paper.hex());
    fmt::print("  submitter {}\n", ctx.name(s.submitter));
    fmt::print("  keywords  {}\n", join_set(s.keywords));
    fmt::print("  bid       {}\n", format_credits(s.bid));
    fmt::print("  status    {}\n", status_name(s.status));
    for (const PersonId& p : s.reviewers) {
        auto sc = s.paper_scores.find(p);
        auto paid = s.paid.find(p);
        fmt::print("  reviewer  {} ask={} score={} scored_reports={} paid={}\n", ctx.name(p),
                   format_credits(s.asks.count(p) ? s.asks.at(p) : 0),
                   sc == s.paper_scores.end() ? "-" : std::to_string(sc->second),
                   s.report_scorers.contains(p) ? "yes" : "no",
                   paid == s.paid.end() ? "-" : format_credits(paid->second));
    }
    if (s.status == SubmissionStatus::Settled) {
        fmt::print("  refunded  {}\n", format_credits(s.refunded));
        fmt::print("  accepted  {}\n", s.accepted ? "yes" : "no");
    }
}

void list_market(Context& ctx) {
    fmt::print("{:<12}  {:>10}  {:>8}  {:>6}  {:>6}  {}\n", "reviewer", "ask", "rs", "active", "cap", "keywords");
    for (const auto& [id, p] : ctx.state().profiles()) {
        fmt::print("{:<12}  {:>10}  {:>8}  {:>6}  {:>6}  {}\n", ctx.name(id), format_credits(p.ask),
                   format_credits(p.rs), p.active, p.capacity, join_set(p.keywords));
    }
    fmt::print("\n{:<12}  {:<12}  {:>10}  {:<13}  {}\n", "submission", "paper", "bid", "status", "reviewers");
    for (const auto& [id, s] : ctx.state().submissions()) {
        fmt::print("{:<12}  {:<12}  {:>10}  {:<13}  {}\n", id.short_hex(), s.paper.short_hex(), format_credits(s.bid),
                   status_name(s.status), join_names(ctx, s.reviewers));
    }
}

// --- reputation --------------------------------------------------------------

void cmd_reputation(Context& ctx, std::optional<Day> at_day, std::optional<double> damping,
                    std::optional<Day> window) {
    SolverOptions so;
    so.damping = damping ? *damping : ctx.ws().config().damping;
    so.at_day = at_day ? *at_day : ctx.state().now();
    so.citation_window = window;
    require(so.damping > 0 && so.damping <= 1, ErrorCode::Config, "damping must be in (0, 1]");
    const ReputationInput in = ctx.state().reputation_input(so.at_day);
    const ReputationState rep = solve_fixed_point(in, so);

    std::map<JournalId, std::size_t> papers, citations;
    std::map<ContentHash, JournalId> where;
    for (const auto& p : in.papers) {
        ++papers[p.journal];
        where[p.hash] = p.journal;
    }
    for (const auto& c : in.citations) {
        if (auto it = where.find(c.cited); it != where.end()) ++citations[it->second];
    }
    auto get = [](const auto& m, const auto& k) {
        auto it = m.find(k);
        return it == m.end() ? 0.0 : it->second;
    };

    fmt::print("reputation at_day={} damping={} window={} iterations={} residual={:.3g} converged={}\n", so.at_day,
               so.damping, window ? std::to_string(*window) : "all", rep.iterations, rep.residual,
               rep.converged ? "yes" : "no");
    fmt::print("\n{:<12}  {:>6}  {:>9}  {:>13}  {:>11}  {}\n", "journal", "papers", "citations", "journal_score",
               "board_score", "title");
    for (const auto& [id, rec] : ctx.state().journals()) {
        fmt::print("{:<12}  {:>6}  {:>9}  {:>13.6f}  {:>11.6f}  {}\n", id.short_hex(), papers[id], citations[id],
                   get(rep.journal_score, id), get(rep.board_score, id), rec.journal.title);
    }
    fmt::print("\n{:<16}  {:>10}  {:>8}  {:>12}\n", "person", "user_score", "rs", "wallet");
    for (const auto& [id, key] : ctx.state().keys().entries()) {
        auto prof = ctx.state().profiles().find(id);
        fmt::print("{:<16}  {:>10.6f}  {:>8}  {:>12}\n", ctx.name(id),
                   rep.user_score.count(id) ? rep.user_score.at(id) : so.default_user_score,
                   prof == ctx.state().profiles().end() ? "-" : format_credits(prof->second.rs),
                   format_credits(ctx.state().balance(Owner::person(id))));
    }
    require(rep.converged, ErrorCode::NonConvergence,
            fmt::format("no fixed point after {} iterations (residual {:.3g})", rep.iterations, rep.residual));
}

// --- simulate, replay, export ------------------------------------------------

void cmd_simulate(const Globals& g, const std::string& path, const std::optional<std::string>& ledger_out,
                  const std::optional<std::string>& metrics_out, bool check) {
    Scenario s = Scenario::load(path);
    std::optional<fs::path> file;
    if (g.config_file) file = *g.config_file;
    const Config cfg = Config::load(g.data, file);
    // An explicit config file overrides the scenario's protocol rules.
    if (g.config_file) {
        s.config = cfg.protocol;
        s.validate();
    }
    if (g.seed) s.seed = *g.seed;
    else if (cfg.seed) s.seed = *cfg.seed;
    RunOptions o;
    o.check_invariants = check || s.check_invariants;
    const RunResult r = run(s, o);

    const std::string metrics = format_metrics(r.metrics);
    if (metrics_out) write_file(*metrics_out, metrics);
    else fmt::print("{}\n", metrics);
    if (ledger_out) r.ledger.save(*ledger_out);
    fmt::print("scenario={}\n{}{}", path, format_summary(s, r), cfg.echo());
}

void cmd_replay(Context& ctx, const std::optional<std::string>& ledger_path, bool verify, bool text) {
    const fs::path path = ledger_path ? fs::path(*ledger_path) : ctx.config().ledger_path;
    const Ledger ledger = Ledger::load(path);  // verifies every link, signature and precondition
    if (text) fmt::print("{}", ledger.render_text());
    if (verify) {
        const State fresh = replay(ledger.events(), ledger.config());
        require(fresh.digest() == ledger.state().digest(), ErrorCode::ChainBreak,
                "replayed state digest differs from the loaded state");
        fresh.check_invariants();
    }
    fmt::print("ledger={}\nevents={}\nledger_head={}\nstate_digest={}\nverified={}\n", path.string(), ledger.size(),
               ledger.head().hex(), ledger.state().digest().hex(), verify ? "yes" : "no");
}

void cmd_export(Context& ctx, const std::string& format, const std::string& what) {
    if (format != "tabular") throw UsageError("unsupported export format '" + format + "'");
    const State& s = ctx.state();
    auto row = [](const std::vector<std::string>& cols) {
        std::string out;
        for (const auto& c : cols) out += (out.empty() ? "" : "\t") + c;
        fmt::print("{}\n", out);
    };
    if (what == "events") {
        row({"seq", "day", "kind", "actor", "hash"});
        for (const Event& e : ctx.ledger().events()) {
            row({std::to_string(e.seq), std::to_string(e.timestamp), std::string(kind_name(e.kind())),
                 ctx.name(e.actor), e.hash().hex()});
        }
    } else if (what == "wallets") {
        row({"owner", "balance"});
        for (const auto& [o, v] : s.wallets()) row({o.str(), format_credits(v)});
    } else if (what == "journals") {
        row({"id", "title", "live", "ancestor", "board", "params", "balance", "papers"});
        for (const auto& [id, rec] : s.journals()) {
            row({id.hex(), rec.journal.title, rec.live() ? "1" : "0",
                 rec.journal.ancestor ? rec.journal.ancestor->hex() : "-", join_names(ctx, rec.journal.board),
                 rec.journal.params.str(), format_credits(s.balance(Owner::journal(id))),
                 std::to_string(rec.publications.size())});
        }
    } else if (what == "papers") {
        row({"hash", "authors", "keywords", "cites", "journal", "published_day"});
        for (const auto& [h, p] : s.papers()) {
            row({h.hex(), join_names(ctx, p.authors), join_set(p.keywords), std::to_string(p.cites.size()),
                 p.published_in ? p.published_in->hex() : "-",
                 p.published_in ? std::to_string(p.published_at) : "-"});
        }
    } else if (what == "rounds") {
        row({"id", "paper", "journal", "status", "fee", "reviewers", "scores", "published"});
        for (const auto& [id, r] : s.rounds()) {
            std::string scores;
            for (int x : r.submitted_scores()) scores += (scores.empty() ? "" : ",") + std::to_string(x);
            row({id.hex(), r.paper.hex(), r.journal.hex(), std::string(status_name(r.status)),
                 format_credits(r.fee), std::to_string(r.reviewers.size()), scores.empty() ? "-" : scores,
                 r.published ? "1" : "0"});
        }
    } else if (what == "submissions") {
        row({"id", "paper", "status", "bid", "reviewers", "refunded", "accepted"});
        for (const auto& [id, sub] : s.submissions()) {
            row({id.hex(), sub.paper.hex(), std::string(status_name(sub.status)), format_credits(sub.bid),
                 join_names(ctx, sub.reviewers), format_credits(sub.refunded), sub.accepted ? "1" : "0"});
        }
    } else if (what == "keys") {
        row({"id", "name", "scheme", "validated"});
        for (const auto& [id, k] : s.keys().entries()) {
            row({id.hex(), ctx.name(id), std::string(scheme_name(k.scheme)), k.validated ? "1" : "0"});
        }
    } else {
        throw UsageError("unknown export table '" + what + "'");
    }
}

int report(const Error& e) {
    std::string msg = e.what();
    if (e.seq()) msg = fmt::format("seq={} {}", *e.seq(), msg);
    fmt::print(stderr, "ERROR {}: {}\n", code_name(e.code()), msg);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (sodium_init() < 0) {
        fmt::print(stderr, "ERROR IO: libsodium failed to initialise\n");
        return 1;
    }
    Globals g;
    CLI::App app{"principia: decentralized journals and a minimal review market on a signed ledger"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--data", g.data, "data directory")->envname("PRINCIPIA_DATA");
    app.add_option("--config", g.config_file, "config file (default: <data>/config when present)");
    app.add_option("--seed", g.seed, "seed override for simulate");
    app.add_option("--as", g.as, "act as this local key");
    app.add_option("--day", g.day, "event day (default: the ledger's current day)");
    app.add_flag("--dry-run", g.dry_run, "validate against the ledger but append nothing");

    Context ctx(g);
    std::function<void()> action;
    auto on = [&](CLI::App* cmd, std::function<void()> fn) { cmd->callback([&action, fn] { action = fn; }); };
    auto group = [](CLI::App* cmd) {
        cmd->require_subcommand(1);
        return cmd;
    };

    // keygen / mint
    std::string name, scheme = "ed25519", amount, who;
    std::optional<std::string> label;
    bool validated = false;
    auto* keygen_cmd = app.add_subcommand("keygen", "create a key and register it on the ledger");
    keygen_cmd->add_option("name", name, "local key name")->required();
    keygen_cmd->add_option("--scheme", scheme, "ed25519 or test-hmac");
    keygen_cmd->add_option("--label", label, "derive the key from a label instead of randomness");
    keygen_cmd->add_flag("--validated", validated, "mark as validated (registrar only)");
    on(keygen_cmd, [&] { cmd_keygen(ctx, name, scheme, label, validated); });

    auto* mint_cmd = app.add_subcommand("mint", "genesis credit issue by the registrar");
    mint_cmd->add_option("person", who)->required();
    mint_cmd->add_option("amount", amount)->required();
    on(mint_cmd, [&] { cmd_mint(ctx, who, amount); });

    // journal
    std::string jref, title, params_text, to;
    std::vector<std::string> names, approvers;
    std::optional<std::string> add, remove, params_change, descendant;
    std::uint64_t nonce = 0;
    auto* journal = group(app.add_subcommand("journal", "journal governance"));

    auto* jcreate = journal->add_subcommand("create", "found a journal (every founder signs)");
    jcreate->add_option("--title", title)->required();
    jcreate->add_option("--founders", names)->required()->delimiter(',');
    jcreate->add_option("--params", params_text, "e.g. f=0.2,a=0,t=30,n=3,r=0.5,p=0.5,m=0.66");
    on(jcreate, [&] {
        auto founders = ctx.keys(names);
        ctx.post(ctx.actor(names.front()), journal_create(title, founders, JournalParams::parse(params_text)));
        for (const auto& [id, rec] : ctx.state().journals()) {
            if (rec.live() && rec.journal.title == title && !ctx.dry_run()) fmt::print("journal {}\n", id.hex());
        }
    });

    auto* jmodify = journal->add_subcommand("modify", "add or remove a member, or change parameters");
    jmodify->add_option("journal", jref)->required();
    auto* add_opt = jmodify->add_option("--add", add);
    auto* rm_opt = jmodify->add_option("--remove", remove);
    auto* par_opt = jmodify->add_option("--params", params_change);
    add_opt->excludes(rm_opt)->excludes(par_opt);
    rm_opt->excludes(par_opt);
    jmodify->add_option("--approvers", approvers)->delimiter(',');
    on(jmodify, [&] {
        const JournalId id = ctx.live_journal(jref);
        JournalChange change;
        if (add) change = BoardAdd{ctx.ws().person(*add)};
        else if (remove) change = BoardRemove{ctx.ws().person(*remove)};
        else if (params_change) change = ParamChange{JournalParams::parse(*params_change, ctx.state().journal(id).journal.params)};
        else throw UsageError("journal modify needs --add, --remove or --params");
        auto keys = ctx.keys(approvers);
        const KeyPair actor = ctx.actor(approvers.empty() ? std::nullopt : std::optional(approvers.front()));
        ctx.post(actor, journal_modify(id, change, keys));
        if (!ctx.dry_run()) fmt::print("journal {}\n", ctx.state().journal(id).descendant->hex());
    });

    std::string bid;
    auto* jjoin = journal->add_subcommand("join", "bid to join a board (fee escrowed)");
    jjoin->add_option("journal", jref)->required();
    jjoin->add_option("--bid", bid)->required();
    on(jjoin, [&] { ctx.post(ctx.actor(), JoinBid{ctx.live_journal(jref), credits(bid)}); });

    auto* jdecide = journal->add_subcommand("decide", "decide the pending join with the given approvals");
    jdecide->add_option("journal", jref)->required();
    jdecide->add_option("--approvers", approvers)->delimiter(',');
    on(jdecide, [&] {
        const JournalId id = ctx.live_journal(jref);
        auto keys = ctx.keys(approvers);
        const KeyPair actor = ctx.actor(approvers.empty() ? std::nullopt : std::optional(approvers.front()));
        ctx.post(actor, join_decision(ctx.state(), id, keys));
    });

    auto* jspend = journal->add_subcommand("spend", "pay out of the journal wallet");
    jspend->add_option("journal", jref)->required();
    jspend->add_option("amount", amount)->required();
    jspend->add_option("--to", to, "person name/id, or owner:hex")->required();
    jspend->add_option("--nonce", nonce);
    jspend->add_option("--approvers", approvers)->required()->delimiter(',');
    on(jspend, [&] {
        const JournalId id = ctx.live_journal(jref);
        const Owner recipient = to.find(':') != std::string::npos ? Owner::parse(to) : Owner::person(ctx.ws().person(to));
        ctx.post(ctx.actor(approvers.front()), balance_spend(id, credits(amount), recipient, nonce, ctx.keys(approvers)));
    });

    auto* jtransfer = journal->add_subcommand("transfer", "move a superseded snapshot's balance to its successor");
    jtransfer->add_option("journal", jref, "the ancestor snapshot")->required();
    jtransfer->add_option("--to", descendant, "descendant (default: the direct successor)");
    jtransfer->add_option("--approvers", approvers)->required()->delimiter(',');
    on(jtransfer, [&] {
        const JournalId from = ctx.journal(jref);
        const auto& rec = ctx.state().journal(from);
        require(descendant || rec.descendant, ErrorCode::NotDescendant, "journal has no successor");
        const JournalId into = descendant ? ctx.journal(*descendant) : *rec.descendant;
        ctx.post(ctx.actor(approvers.front()), balance_transfer(from, into, ctx.keys(approvers)));
    });

    std::optional<std::string> opt_ref;
    auto* jshow = journal->add_subcommand("show", "list journals, or show one");
    jshow->add_option("journal", opt_ref);
    on(jshow, [&] { opt_ref ? print_journal(ctx, ctx.journal(*opt_ref)) : list_journals(ctx); });

    // paper
    std::string pref, file, fee;
    std::vector<std::string> keywords, cites;
    auto* paper = group(app.add_subcommand("paper", "papers and citations"));

    auto* ppublish = paper->add_subcommand("publish", "register a paper (stored as a blob; all authors sign)");
    ppublish->add_option("file", file)->required()->check(CLI::ExistingFile);
    ppublish->add_option("--authors", names)->required()->delimiter(',');
    ppublish->add_option("--keywords", keywords)->delimiter(',');
    ppublish->add_option("--cites", cites)->delimiter(',');
    on(ppublish, [&] {
        const ContentHash h = ctx.ws().put_file(file);
        std::set<ContentHash> cited;
        for (const auto& c : cites) cited.insert(ctx.paper(c));
        auto authors = ctx.keys(names);
        ctx.post(ctx.actor(names.front()), paper_publish(h, authors, to_set(keywords), cited));
        fmt::print("paper {}\n", h.hex());
    });

    auto* pbid = paper->add_subcommand("bid", "offer a review fee to a journal");
    pbid->add_option("paper", pref)->required();
    pbid->add_option("journal", jref)->required();
    pbid->add_option("--fee", fee)->required();
    on(pbid, [&] {
        const ContentHash h = ctx.paper(pref);
        const auto& authors = ctx.state().paper(h).authors;
        ctx.post(ctx.actor_for(*authors.begin()), ReviewBid{h, ctx.live_journal(jref), credits(fee)});
        if (!ctx.dry_run()) fmt::print("round {}\n", ctx.state().paper(h).active_round->hex());
    });

    auto* pcite = paper->add_subcommand("cite", "declare further citations");
    pcite->add_option("paper", pref)->required();
    pcite->add_option("--cites", cites)->required()->delimiter(',');
    on(pcite, [&] {
        const ContentHash h = ctx.paper(pref);
        std::set<ContentHash> cited;
        for (const auto& c : cites) cited.insert(ctx.paper(c));
        ctx.post(ctx.actor_for(*ctx.state().paper(h).authors.begin()), CitationDeclare{h, cited});
    });

    auto* pshow = paper->add_subcommand("show", "list papers, or show one");
    pshow->add_option("paper", opt_ref);
    on(pshow, [&] {
        if (opt_ref) return print_paper(ctx, ctx.paper(*opt_ref));
        fmt::print("{:<12}  {:<24}  {:<12}  {}\n", "paper", "authors", "journal", "keywords");
        for (const auto& [h, p] : ctx.state().papers()) {
            fmt::print("{:<12}  {:<24}  {:<12}  {}\n", h.short_hex(), join_names(ctx, p.authors),
                       p.published_in ? p.published_in->short_hex() : "-", join_set(p.keywords));
        }
    });

    // review
    std::string rref, report_arg;
    int score = 0;
    bool approve = false, reject = false, confirm = false;
    auto* review = group(app.add_subcommand("review", "journal review rounds"));
    auto submitter_of = [&](const RoundId& id) { return ctx.actor_for(ctx.state().round(id).submitter); };

    auto* raccept = review->add_subcommand("accept", "board vote accepting the paper for review");
    raccept->add_option("round", rref, "round id or paper hash")->required();
    raccept->add_option("--approvers", approvers)->required()->delimiter(',');
    raccept->add_flag("--confirm", confirm, "attach the submitter's confirmation (needs their key)");
    on(raccept, [&] {
        const RoundId id = ctx.round(rref);
        const KeyPair sub = submitter_of(id);
        ctx.post(sub, accept_vote(id, ctx.keys(approvers), confirm ? &sub : nullptr));
    });

    auto* rassign = review->add_subcommand("assign", "draw the reviewers");
    rassign->add_option("round", rref)->required();
    on(rassign, [&] {
        const RoundId id = ctx.round(rref);
        ctx.post(submitter_of(id), ReviewerAssignment{id});
        if (!ctx.dry_run()) print_round(ctx, id);
    });

    auto* rsubmit = review->add_subcommand("submit", "submit a score and report (--as reviewer)");
    rsubmit->add_option("round", rref)->required();
    rsubmit->add_option("--score", score)->required();
    rsubmit->add_option("--report", report_arg, "report file or text")->required();
    on(rsubmit, [&] {
        const RoundId id = ctx.round(rref);
        const KeyPair me = ctx.actor();
        ctx.post(me, ReviewSubmit{id, score_arg(score), blob_arg(ctx, report_arg)});
    });

    auto* rdecide = review->add_subcommand("decide", "record the publication decision");
    rdecide->add_option("round", rref)->required();
    on(rdecide, [&] {
        const RoundId id = ctx.round(rref);
        ctx.post(submitter_of(id), PublicationDecision{id});
    });

    auto* rfinal = review->add_subcommand("final", "submit the final version of an accepted paper");
    rfinal->add_option("round", rref)->required();
    rfinal->add_option("file", file)->required()->check(CLI::ExistingFile);
    on(rfinal, [&] {
        const RoundId id = ctx.round(rref);
        ctx.post(submitter_of(id), FinalVersion{id, ctx.ws().put_file(file)});
    });

    auto* rvote = review->add_subcommand("vote", "vote on the final version (--as reviewer)");
    rvote->add_option("round", rref)->required();
    auto* ap = rvote->add_flag("--approve", approve);
    auto* rj = rvote->add_flag("--reject", reject);
    ap->excludes(rj);
    on(rvote, [&] {
        if (approve == reject) throw UsageError("review vote needs --approve or --reject");
        const RoundId id = ctx.round(rref);
        const KeyPair me = ctx.actor();
        ctx.post(me, FinalVote{id, approve});
    });

    auto* rsettle = review->add_subcommand("settle", "split the review fee and close the round");
    rsettle->add_option("round", rref)->required();
    on(rsettle, [&] {
        const RoundId id = ctx.round(rref);
        ctx.post(submitter_of(id), FeeSettlement{id});
        if (!ctx.dry_run()) print_round(ctx, id);
    });

    auto* rshow = review->add_subcommand("show", "list rounds, or show one");
    rshow->add_option("round", opt_ref);
    on(rshow, [&] { opt_ref ? print_round(ctx, ctx.round(*opt_ref)) : list_rounds(ctx); });

    // market
    std::string sref;
    std::uint32_t capacity = 1;
    std::vector<std::string> score_pairs;
    auto* market = group(app.add_subcommand("market", "the journal-free review market"));

    auto* mask = market->add_subcommand("ask", "post or update a reviewer ask (--as reviewer)");
    mask->add_option("--fee", fee)->required();
    mask->add_option("--keywords", keywords)->required()->delimiter(',');
    mask->add_option("--capacity", capacity);
    on(mask, [&] {
        const KeyPair me = ctx.actor();
        ctx.post(me, MarketAsk{credits(fee), to_set(keywords), capacity});
    });

    auto* msubmit = market->add_subcommand("submit", "offer a paper with a review budget");
    msubmit->add_option("paper", pref)->required();
    msubmit->add_option("--bid", bid)->required();
    msubmit->add_option("--keywords", keywords, "default: the paper's keywords")->delimiter(',');
    on(msubmit, [&] {
        const ContentHash h = ctx.paper(pref);
        ctx.post(ctx.actor_for(*ctx.state().paper(h).authors.begin()), MarketSubmit{h, to_set(keywords), credits(bid)});
        if (!ctx.dry_run()) fmt::print("submission {}\n", ctx.state().paper(h).market_submission->hex());
    });

    auto* msweep = market->add_subcommand("sweep", "match every waiting submission that has a feasible pool");
    on(msweep, [&] {
        std::vector<const MarketSubmission*> waiting;
        for (const auto& [id, s] : ctx.state().submissions()) {
            if (s.status == SubmissionStatus::Submitted) waiting.push_back(&s);
        }
        std::sort(waiting.begin(), waiting.end(), [](auto* a, auto* b) { return a->created_seq < b->created_seq; });
        std::vector<SubmissionId> ids;
        for (auto* s : waiting) ids.push_back(s->id);
        int matched = 0;
        for (const SubmissionId& id : ids) {
            const auto& sub = ctx.state().submission(id);
            auto chosen = feasible_match(ctx.state(), sub);
            if (!chosen) {
                fmt::print("unmatched {} (no feasible pool)\n", id.short_hex());
                continue;
            }
            ctx.post(ctx.actor_for(sub.submitter), MarketMatch{id, *chosen});
            ++matched;
            if (ctx.dry_run()) break;  // later checks would see stale capacity
        }
        fmt::print("matched={} waiting={}\n", matched, ids.size());
    });

    auto* mreview = market->add_subcommand("review", "score the paper and attach a report (--as reviewer)");
    mreview->add_option("submission", sref, "submission id or paper hash")->required();
    mreview->add_option("--score", score)->required();
    mreview->add_option("--report", report_arg)->required();
    on(mreview, [&] {
        const SubmissionId id = ctx.submission(sref);
        const KeyPair me = ctx.actor();
        ctx.post(me, MarketReview{id, score_arg(score), blob_arg(ctx, report_arg)});
    });

    auto* mscore = market->add_subcommand("report-score", "score the other reviewers' reports (--as reviewer)");
    mscore->add_option("submission", sref)->required();
    mscore->add_option("--scores", score_pairs, "NAME=SCORE,...")->required()->delimiter(',');
    on(mscore, [&] {
        const SubmissionId id = ctx.submission(sref);
        MarketReportScore body{id, {}};
        for (const auto& pair : score_pairs) {
            const auto eq = pair.find('=');
            if (eq == std::string::npos) throw UsageError("expected NAME=SCORE, got '" + pair + "'");
            int v = 0;
            try {
                v = std::stoi(pair.substr(eq + 1));
            } catch (const std::exception&) {
                throw UsageError("bad score in '" + pair + "'");
            }
            body.scores.emplace_back(ctx.ws().person(pair.substr(0, eq)), score_arg(v));
        }
        const KeyPair me = ctx.actor();
        ctx.post(me, std::move(body));
    });

    auto* msettle = market->add_subcommand("settle", "pay reviewers, update RS and decide acceptance");
    msettle->add_option("submission", sref)->required();
    on(msettle, [&] {
        const SubmissionId id = ctx.submission(sref);
        ctx.post(ctx.actor_for(ctx.state().submission(id).submitter), MarketSettlement{id});
        if (!ctx.dry_run()) print_submission(ctx, id);
    });

    auto* mshow = market->add_subcommand("show", "list asks and submissions, or show one submission");
    mshow->add_option("submission", opt_ref);
    on(mshow, [&] { opt_ref ? print_submission(ctx, ctx.submission(*opt_ref)) : list_market(ctx); });

    std::vector<std::string> exclude;
    auto* msuggest = market->add_subcommand("suggest", "fair bid for a keyword set");
    msuggest->add_option("--keywords", keywords)->required()->delimiter(',');
    msuggest->add_option("--exclude", exclude, "authors to leave out")->delimiter(',');
    on(msuggest, [&] {
        std::set<PersonId> ex;
        for (const auto& e : exclude) ex.insert(ctx.ws().person(e));
        std::vector<Micro> asks;
        for (const Candidate& c : ctx.state().eligible_candidates(to_set(keywords), ex)) asks.push_back(c.ask);
        fmt::print("eligible={}\nfair_bid={}\n", asks.size(), format_credits(suggest_fair_bid(asks)));
    });

    // reputation
    std::optional<Day> at_day, window;
    std::optional<double> damping;
    auto* reputation = group(app.add_subcommand("reputation", "journal, board and user scores"));
    auto* rreport = reputation->add_subcommand("report", "solve the fixed point and print the score tables");
    rreport->add_option("--at-day", at_day);
    rreport->add_option("--damping", damping);
    rreport->add_option("--window", window, "count only citations from the last N days");
    on(rreport, [&] { cmd_reputation(ctx, at_day, damping, window); });

    // simulate / replay / export
    std::string scenario_path;
    std::optional<std::string> ledger_out, metrics_out, ledger_in;
    bool check = false, verify = false, text = false;
    auto* simulate = app.add_subcommand("simulate", "run a scenario file");
    simulate->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
    simulate->add_option("--ledger-out", ledger_out);
    simulate->add_option("--metrics-out", metrics_out);
    simulate->add_flag("--check-invariants", check);
    on(simulate, [&] { cmd_simulate(g, scenario_path, ledger_out, metrics_out, check); });

    auto* replay_cmd = app.add_subcommand("replay", "load a ledger, checking every link and signature");
    replay_cmd->add_option("--ledger", ledger_in, "ledger file (default: the data directory's)");
    replay_cmd->add_flag("--verify", verify, "also rebuild state from scratch and compare digests");
    replay_cmd->add_flag("--text", text, "print one line per event");
    on(replay_cmd, [&] { cmd_replay(ctx, ledger_in, verify, text); });

    std::string format = "tabular", what = "events";
    auto* export_cmd = app.add_subcommand("export", "dump ledger state as tab-separated tables");
    export_cmd->add_option("--format", format);
    export_cmd->add_option("--what", what, "events|journals|papers|rounds|submissions|wallets|keys");
    on(export_cmd, [&] { cmd_export(ctx, format, what); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (msg.empty()) msg = e.get_name();
        fmt::print(stderr, "ERROR USAGE: {}\n", msg);
        return 2;
    }

    try {
        // Everything but scenario runs and replays of outside files works on
        // the data directory, so take its lock before printing anything.
        const bool outside = simulate->parsed() || (replay_cmd->parsed() && ledger_in);
        if (!outside) ctx.ws();
        if (action) action();
        return 0;
    } catch (const UsageError& e) {
        fmt::print(stderr, "ERROR USAGE: {}\n", e.what());
        return 2;
    } catch (const Error& e) {
        return report(e);
    } catch (const fs::filesystem_error& e) {
        fmt::print(stderr, "ERROR IO: {}\n", e.what());
        return 1;
    }
}
