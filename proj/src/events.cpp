#include "principia/events.hpp"

#include <fmt/format.h>

#include <sstream>

#include "principia/error.hpp"

namespace principia {

namespace {

constexpr std::uint8_t kEventVersion = 1;

// --- field helpers -----------------------------------------------------------

void put_sigs(Writer& w, const std::vector<Signature>& sigs) {
    w.list(sigs, [](Writer& w, const Signature& s) { encode_signature(w, s); });
}

std::vector<Signature> get_sigs(Reader& r) {
    std::vector<Signature> out(r.count());
    for (auto& s : out) s = decode_signature(r);
    return out;
}

template <class Tag>
void put_digest_set(Writer& w, const std::set<Digest<Tag>>& s) {
    w.collection(s, [](Writer& w, const Digest<Tag>& d) { w.digest(d); });
}

template <class Tag>
std::set<Digest<Tag>> get_digest_set(Reader& r) {
    std::set<Digest<Tag>> out;
    for (std::uint32_t n = r.count(); n > 0; --n) out.insert(r.digest<Tag>());
    return out;
}

template <class Tag>
void put_digest_list(Writer& w, const std::vector<Digest<Tag>>& v) {
    w.list(v, [](Writer& w, const Digest<Tag>& d) { w.digest(d); });
}

template <class Tag>
std::vector<Digest<Tag>> get_digest_list(Reader& r) {
    std::vector<Digest<Tag>> out(r.count());
    for (auto& d : out) d = r.digest<Tag>();
    return out;
}

void put_strings(Writer& w, const std::set<std::string>& s) {
    w.collection(s, [](Writer& w, const std::string& x) { w.str(x); });
}

std::set<std::string> get_strings(Reader& r) {
    std::set<std::string> out;
    for (std::uint32_t n = r.count(); n > 0; --n) out.insert(r.str());
    return out;
}

Micro get_amount(Reader& r) {
    Micro v = r.i64();
    require(v >= 0, ErrorCode::Decode, "negative amount");
    return v;
}

// --- per-body codecs ---------------------------------------------------------

void enc(Writer& w, const KeyRegister& b) {
    w.u8(static_cast<std::uint8_t>(b.scheme)).blob(b.public_key).boolean(b.validated);
}
void enc(Writer& w, const Mint& b) { w.digest(b.to).i64(b.amount); }
void enc(Writer& w, const JournalCreate& b) {
    w.str(b.title);
    put_digest_set(w, b.founders);
    b.params.encode(w);
    put_sigs(w, b.signatures);
}
void enc(Writer& w, const JournalModify& b) {
    w.digest(b.journal);
    encode_change(w, b.change);
    put_sigs(w, b.approvals);
}
void enc(Writer& w, const JoinBid& b) { w.digest(b.journal).i64(b.bid); }
void enc(Writer& w, const JoinDecision& b) {
    w.digest(b.journal);
    put_sigs(w, b.approvals);
}
void enc(Writer& w, const BalanceSpend& b) {
    w.digest(b.journal).i64(b.amount);
    b.recipient.encode(w);
    w.u64(b.nonce);
    put_sigs(w, b.approvals);
}
void enc(Writer& w, const BalanceTransfer& b) {
    w.digest(b.ancestor).digest(b.descendant);
    put_sigs(w, b.approvals);
}
void enc(Writer& w, const PaperPublish& b) {
    w.digest(b.paper);
    put_digest_set(w, b.authors);
    put_sigs(w, b.author_signatures);
    put_strings(w, b.keywords);
    put_digest_set(w, b.cites);
}
void enc(Writer& w, const ReviewBid& b) { w.digest(b.paper).digest(b.journal).i64(b.fee); }
void enc(Writer& w, const ReviewAcceptVote& b) {
    w.digest(b.round);
    put_sigs(w, b.approvals);
    w.boolean(b.author_confirmation.has_value());
    if (b.author_confirmation) encode_signature(w, *b.author_confirmation);
}
void enc(Writer& w, const ReviewerAssignment& b) { w.digest(b.round); }
void enc(Writer& w, const ReviewSubmit& b) { w.digest(b.round).u8(b.score).digest(b.report); }
void enc(Writer& w, const PublicationDecision& b) { w.digest(b.round); }
void enc(Writer& w, const FinalVersion& b) { w.digest(b.round).digest(b.final_version); }
void enc(Writer& w, const FinalVote& b) { w.digest(b.round).boolean(b.approve); }
void enc(Writer& w, const FeeSettlement& b) { w.digest(b.round); }
void enc(Writer& w, const CitationDeclare& b) {
    w.digest(b.paper);
    put_digest_set(w, b.cites);
}
void enc(Writer& w, const MarketSubmit& b) {
    w.digest(b.paper);
    put_strings(w, b.keywords);
    w.i64(b.bid);
}
void enc(Writer& w, const MarketMatch& b) {
    w.digest(b.submission);
    put_digest_list(w, b.reviewers);
}
void enc(Writer& w, const MarketReview& b) { w.digest(b.submission).u8(b.score).digest(b.report); }
void enc(Writer& w, const MarketReportScore& b) {
    w.digest(b.submission);
    w.list(b.scores, [](Writer& w, const auto& kv) { w.digest(kv.first).u8(kv.second); });
}
void enc(Writer& w, const MarketSettlement& b) { w.digest(b.submission); }
void enc(Writer& w, const MarketAsk& b) {
    w.i64(b.fee);
    put_strings(w, b.keywords);
    w.u32(b.capacity);
}

template <class T>
T dec(Reader& r);

template <>
KeyRegister dec(Reader& r) {
    KeyRegister b;
    std::uint8_t s = r.u8();
    require(s == 1 || s == 2, ErrorCode::Decode, "unknown scheme byte");
    b.scheme = static_cast<Scheme>(s);
    b.public_key = r.blob();
    b.validated = r.boolean();
    return b;
}
template <>
Mint dec(Reader& r) {
    Mint b;
    b.to = r.digest<PersonIdTag>();
    b.amount = get_amount(r);
    return b;
}
template <>
JournalCreate dec(Reader& r) {
    JournalCreate b;
    b.title = r.str();
    b.founders = get_digest_set<PersonIdTag>(r);
    b.params = JournalParams::decode(r);
    b.signatures = get_sigs(r);
    return b;
}
template <>
JournalModify dec(Reader& r) {
    JournalModify b;
    b.journal = r.digest<JournalIdTag>();
    b.change = decode_change(r);
    b.approvals = get_sigs(r);
    return b;
}
template <>
JoinBid dec(Reader& r) {
    JoinBid b;
    b.journal = r.digest<JournalIdTag>();
    b.bid = get_amount(r);
    return b;
}
template <>
JoinDecision dec(Reader& r) {
    JoinDecision b;
    b.journal = r.digest<JournalIdTag>();
    b.approvals = get_sigs(r);
    return b;
}
template <>
BalanceSpend dec(Reader& r) {
    BalanceSpend b;
    b.journal = r.digest<JournalIdTag>();
    b.amount = get_amount(r);
    b.recipient = Owner::decode(r);
    b.nonce = r.u64();
    b.approvals = get_sigs(r);
    return b;
}
template <>
BalanceTransfer dec(Reader& r) {
    BalanceTransfer b;
    b.ancestor = r.digest<JournalIdTag>();
    b.descendant = r.digest<JournalIdTag>();
    b.approvals = get_sigs(r);
    return b;
}
template <>
PaperPublish dec(Reader& r) {
    PaperPublish b;
    b.paper = r.digest<ContentHashTag>();
    b.authors = get_digest_set<PersonIdTag>(r);
    b.author_signatures = get_sigs(r);
    b.keywords = get_strings(r);
    b.cites = get_digest_set<ContentHashTag>(r);
    return b;
}
template <>
ReviewBid dec(Reader& r) {
    ReviewBid b;
    b.paper = r.digest<ContentHashTag>();
    b.journal = r.digest<JournalIdTag>();
    b.fee = get_amount(r);
    return b;
}
template <>
ReviewAcceptVote dec(Reader& r) {
    ReviewAcceptVote b;
    b.round = r.digest<RoundIdTag>();
    b.approvals = get_sigs(r);
    if (r.boolean()) b.author_confirmation = decode_signature(r);
    return b;
}
template <>
ReviewerAssignment dec(Reader& r) {
    return {r.digest<RoundIdTag>()};
}
template <>
ReviewSubmit dec(Reader& r) {
    ReviewSubmit b;
    b.round = r.digest<RoundIdTag>();
    b.score = r.u8();
    b.report = r.digest<ContentHashTag>();
    return b;
}
template <>
PublicationDecision dec(Reader& r) {
    return {r.digest<RoundIdTag>()};
}
template <>
FinalVersion dec(Reader& r) {
    FinalVersion b;
    b.round = r.digest<RoundIdTag>();
    b.final_version = r.digest<ContentHashTag>();
    return b;
}
template <>
FinalVote dec(Reader& r) {
    FinalVote b;
    b.round = r.digest<RoundIdTag>();
    b.approve = r.boolean();
    return b;
}
template <>
FeeSettlement dec(Reader& r) {
    return {r.digest<RoundIdTag>()};
}
template <>
CitationDeclare dec(Reader& r) {
    CitationDeclare b;
    b.paper = r.digest<ContentHashTag>();
    b.cites = get_digest_set<ContentHashTag>(r);
    return b;
}
template <>
MarketSubmit dec(Reader& r) {
    MarketSubmit b;
    b.paper = r.digest<ContentHashTag>();
    b.keywords = get_strings(r);
    b.bid = get_amount(r);
    return b;
}
template <>
MarketMatch dec(Reader& r) {
    MarketMatch b;
    b.submission = r.digest<SubmissionIdTag>();
    b.reviewers = get_digest_list<PersonIdTag>(r);
    return b;
}
template <>
MarketReview dec(Reader& r) {
    MarketReview b;
    b.submission = r.digest<SubmissionIdTag>();
    b.score = r.u8();
    b.report = r.digest<ContentHashTag>();
    return b;
}
template <>
MarketReportScore dec(Reader& r) {
    MarketReportScore b;
    b.submission = r.digest<SubmissionIdTag>();
    b.scores.resize(r.count());
    for (auto& [who, score] : b.scores) {
        who = r.digest<PersonIdTag>();
        score = r.u8();
    }
    return b;
}
template <>
MarketSettlement dec(Reader& r) {
    return {r.digest<SubmissionIdTag>()};
}
template <>
MarketAsk dec(Reader& r) {
    MarketAsk b;
    b.fee = get_amount(r);
    b.keywords = get_strings(r);
    b.capacity = r.u32();
    return b;
}

template <std::size_t I = 0>
EventBody decode_alternative(Reader& r, std::size_t index) {
    if constexpr (I < std::variant_size_v<EventBody>) {
        if (index == I) {
            return EventBody{std::in_place_index<I>, dec<std::variant_alternative_t<I, EventBody>>(r)};
        }
        return decode_alternative<I + 1>(r, index);
    } else {
        fail(ErrorCode::Decode, "unknown event kind " + std::to_string(index));
    }
}

// --- text rendering ------------------------------------------------------------

std::string sig_list(const std::vector<Signature>& sigs) {
    std::string out = "[";
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        if (i) out += ',';
        out += sigs[i].signer.hex();
    }
    return out + "]";
}

template <class Tag>
std::string id_list(const std::set<Digest<Tag>>& ids) {
    std::string out = "[";
    bool first = true;
    for (const auto& d : ids) {
        if (!first) out += ',';
        first = false;
        out += d.hex();
    }
    return out + "]";
}

template <class Tag>
std::string id_list(const std::vector<Digest<Tag>>& ids) {
    return id_list(std::set<Digest<Tag>>(ids.begin(), ids.end()));
}

std::string word_list(const std::set<std::string>& words) {
    std::string out = "[";
    bool first = true;
    for (const auto& w : words) {
        if (!first) out += ',';
        first = false;
        out += w;
    }
    return out + "]";
}

struct Describe {
    std::string operator()(const KeyRegister& b) const {
        return fmt::format("scheme={} pubkey={} validated={}", scheme_name(b.scheme),
                           to_hex(b.public_key), b.validated);
    }
    std::string operator()(const Mint& b) const {
        return fmt::format("to={} amount={}", b.to.hex(), b.amount);
    }
    std::string operator()(const JournalCreate& b) const {
        return fmt::format("title=\"{}\" founders={} params={} signatures={}", b.title,
                           id_list(b.founders), b.params.str(), sig_list(b.signatures));
    }
    std::string operator()(const JournalModify& b) const {
        return fmt::format("journal={} change={} approvals={}", b.journal.hex(),
                           describe_change(b.change), sig_list(b.approvals));
    }
    std::string operator()(const JoinBid& b) const {
        return fmt::format("journal={} bid={}", b.journal.hex(), b.bid);
    }
    std::string operator()(const JoinDecision& b) const {
        return fmt::format("journal={} approvals={}", b.journal.hex(), sig_list(b.approvals));
    }
    std::string operator()(const BalanceSpend& b) const {
        return fmt::format("journal={} amount={} recipient={} nonce={} approvals={}", b.journal.hex(),
                           b.amount, b.recipient.str(), b.nonce, sig_list(b.approvals));
    }
    std::string operator()(const BalanceTransfer& b) const {
        return fmt::format("ancestor={} descendant={} approvals={}", b.ancestor.hex(),
                           b.descendant.hex(), sig_list(b.approvals));
    }
    std::string operator()(const PaperPublish& b) const {
        return fmt::format("paper={} authors={} keywords={} cites={}", b.paper.hex(),
                           id_list(b.authors), word_list(b.keywords), id_list(b.cites));
    }
    std::string operator()(const ReviewBid& b) const {
        return fmt::format("paper={} journal={} fee={}", b.paper.hex(), b.journal.hex(), b.fee);
    }
    std::string operator()(const ReviewAcceptVote& b) const {
        return fmt::format("round={} approvals={} confirmed_by={}", b.round.hex(), sig_list(b.approvals),
                           b.author_confirmation ? b.author_confirmation->signer.hex() : "-");
    }
    std::string operator()(const ReviewerAssignment& b) const {
        return fmt::format("round={}", b.round.hex());
    }
    std::string operator()(const ReviewSubmit& b) const {
        return fmt::format("round={} score={} report={}", b.round.hex(), b.score, b.report.hex());
    }
    std::string operator()(const PublicationDecision& b) const {
        return fmt::format("round={}", b.round.hex());
    }
    std::string operator()(const FinalVersion& b) const {
        return fmt::format("round={} final={}", b.round.hex(), b.final_version.hex());
    }
    std::string operator()(const FinalVote& b) const {
        return fmt::format("round={} approve={}", b.round.hex(), b.approve);
    }
    std::string operator()(const FeeSettlement& b) const {
        return fmt::format("round={}", b.round.hex());
    }
    std::string operator()(const CitationDeclare& b) const {
        return fmt::format("paper={} cites={}", b.paper.hex(), id_list(b.cites));
    }
    std::string operator()(const MarketSubmit& b) const {
        return fmt::format("paper={} keywords={} bid={}", b.paper.hex(), word_list(b.keywords), b.bid);
    }
    std::string operator()(const MarketMatch& b) const {
        return fmt::format("submission={} reviewers={}", b.submission.hex(), id_list(b.reviewers));
    }
    std::string operator()(const MarketReview& b) const {
        return fmt::format("submission={} score={} report={}", b.submission.hex(), b.score,
                           b.report.hex());
    }
    std::string operator()(const MarketReportScore& b) const {
        std::string scores = "[";
        for (std::size_t i = 0; i < b.scores.size(); ++i) {
            if (i) scores += ',';
            scores += fmt::format("{}:{}", b.scores[i].first.hex(), b.scores[i].second);
        }
        return fmt::format("submission={} scores={}]", b.submission.hex(), scores);
    }
    std::string operator()(const MarketSettlement& b) const {
        return fmt::format("submission={}", b.submission.hex());
    }
    std::string operator()(const MarketAsk& b) const {
        return fmt::format("fee={} keywords={} capacity={}", b.fee, word_list(b.keywords), b.capacity);
    }
};

}  // namespace

std::string_view kind_name(EventKind k) noexcept {
    switch (k) {
        case EventKind::KeyRegister: return "KeyRegister";
        case EventKind::JournalCreate: return "JournalCreate";
        case EventKind::JournalModify: return "JournalModify";
        case EventKind::JoinBid: return "JoinBid";
        case EventKind::JoinDecision: return "JoinDecision";
        case EventKind::BalanceSpend: return "BalanceSpend";
        case EventKind::BalanceTransfer: return "BalanceTransfer";
        case EventKind::PaperPublish: return "PaperPublish";
        case EventKind::ReviewBid: return "ReviewBid";
        case EventKind::ReviewAcceptVote: return "ReviewAcceptVote";
        case EventKind::ReviewerAssignment: return "ReviewerAssignment";
        case EventKind::ReviewSubmit: return "ReviewSubmit";
        case EventKind::PublicationDecision: return "PublicationDecision";
        case EventKind::FinalVersion: return "FinalVersion";
        case EventKind::FinalVote: return "FinalVote";
        case EventKind::FeeSettlement: return "FeeSettlement";
        case EventKind::CitationDeclare: return "CitationDeclare";
        case EventKind::MarketSubmit: return "MarketSubmit";
        case EventKind::MarketMatch: return "MarketMatch";
        case EventKind::MarketReview: return "MarketReview";
        case EventKind::MarketReportScore: return "MarketReportScore";
        case EventKind::MarketSettlement: return "MarketSettlement";
        case EventKind::Mint: return "Mint";
        case EventKind::MarketAsk: return "MarketAsk";
    }
    return "Unknown";
}

void encode_body(Writer& w, const EventBody& body) {
    std::visit([&](const auto& b) { enc(w, b); }, body);
}

EventBody decode_body(Reader& r, EventKind kind) {
    return decode_alternative(r, static_cast<std::size_t>(kind));
}

std::string describe_body(const EventBody& body) { return std::visit(Describe{}, body); }

void encode_signature(Writer& w, const Signature& s) {
    w.digest(s.signer).digest(s.payload_hash).blob(s.bytes);
}

Signature decode_signature(Reader& r) {
    Signature s;
    s.signer = r.digest<PersonIdTag>();
    s.payload_hash = r.digest<ContentHashTag>();
    s.bytes = r.blob();
    return s;
}

Bytes Event::signing_bytes() const {
    Writer w;
    w.u8(kEventVersion).u64(seq).digest(prev_hash).i64(timestamp).digest(actor);
    w.u8(static_cast<std::uint8_t>(kind()));
    encode_body(w, body);
    return w.take();
}

Bytes Event::encode() const {
    Writer w;
    w.raw(signing_bytes());
    encode_signature(w, signature);
    return w.take();
}

Event Event::decode(ByteView bytes) {
    Reader r(bytes);
    require(r.u8() == kEventVersion, ErrorCode::Decode, "unsupported event version");
    Event e;
    e.seq = r.u64();
    e.prev_hash = r.digest<ContentHashTag>();
    e.timestamp = r.i64();
    e.actor = r.digest<PersonIdTag>();
    auto kind = r.u8();
    e.body = decode_body(r, static_cast<EventKind>(kind));
    e.signature = decode_signature(r);
    r.expect_done();
    return e;
}

ContentHash Event::hash() const { return content_hash(encode()); }

std::string Event::describe() const {
    return fmt::format("seq={} day={} kind={} actor={} prev={} {}", seq, timestamp, kind_name(kind()),
                       actor.hex(), prev_hash.hex(), describe_body(body));
}

}  // namespace principia
