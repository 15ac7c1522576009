#include "principia/ledger.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iterator>

#include "principia/error.hpp"

namespace principia {

namespace {

constexpr std::string_view kMagic = "PRLG";
constexpr std::uint32_t kFormatVersion = 1;

[[noreturn]] void chain_break(std::optional<std::uint64_t> seq, const std::string& msg) {
    Error err(ErrorCode::ChainBreak, msg);
    if (seq) err.set_seq(*seq);
    throw err;
}

}  // namespace

Ledger::Ledger(ProtocolConfig config) : state_((config.validate(), std::move(config))) {}

ContentHash Ledger::head() const { return hashes_.empty() ? ContentHash{} : hashes_.back(); }

Event Ledger::make_event(const KeyPair& actor, Day day, EventBody body) const {
    Event e;
    e.seq = size();
    e.prev_hash = head();
    e.timestamp = day;
    e.actor = actor.id();
    e.body = std::move(body);
    e.signature = sign(actor, e.signing_bytes());
    return e;
}

void Ledger::verify_link_and_signature(const Event& event) const {
    if (event.seq != size()) {
        chain_break(event.seq, fmt::format("expected seq {}, got {}", size(), event.seq));
    }
    if (event.prev_hash != head()) {
        chain_break(event.seq, "prev_hash does not match the previous event");
    }
    require(event.signature.signer == event.actor, ErrorCode::BadSignature, "signature is not by the actor");
    const Bytes message = event.signing_bytes();
    if (const RegisteredKey* key = state_.keys().find(event.actor)) {
        require(verify(key->scheme, key->public_key, message, event.signature), ErrorCode::BadSignature,
                "signature does not verify");
        return;
    }
    // A key registering itself signs with the key it carries.
    if (const auto* reg = std::get_if<KeyRegister>(&event.body);
        reg && person_id(reg->scheme, reg->public_key) == event.actor) {
        require(verify(reg->scheme, reg->public_key, message, event.signature), ErrorCode::BadSignature,
                "self-registration signature does not verify");
        return;
    }
    fail(ErrorCode::BadSignature, "actor " + event.actor.short_hex() + " is not registered");
}

const Event& Ledger::append(Event event) {
    try {
        verify_link_and_signature(event);
        state_.apply(event);
    } catch (Error& err) {
        err.set_seq(event.seq);
        throw;
    }
    hashes_.push_back(event.hash());
    events_.push_back(std::move(event));
    if (hook_) hook_(*this, events_.back());
    return events_.back();
}

const Event& Ledger::append(const KeyPair& actor, Day day, EventBody body) {
    return append(make_event(actor, day, std::move(body)));
}

void Ledger::check(const Event& event) const {
    try {
        verify_link_and_signature(event);
        State copy = state_;
        copy.apply(event);
    } catch (Error& err) {
        err.set_seq(event.seq);
        throw;
    }
}

Bytes Ledger::serialize() const {
    Writer w;
    w.raw(as_bytes(kMagic)).u32(kFormatVersion);
    Writer cfg;
    config().encode(cfg);
    w.blob(cfg.bytes()).digest(content_hash(cfg.bytes()));
    for (std::size_t i = 0; i < events_.size(); ++i) {
        w.blob(events_[i].encode()).digest(hashes_[i]);
    }
    return w.take();
}

Ledger Ledger::deserialize(ByteView bytes) {
    Reader r(bytes);
    std::optional<Ledger> ledger;
    try {
        ByteView magic = r.raw(kMagic.size());
        require(std::equal(magic.begin(), magic.end(), kMagic.begin()), ErrorCode::Decode, "not a ledger file");
        require(r.u32() == kFormatVersion, ErrorCode::Decode, "unsupported ledger version");
        Bytes cfg = r.blob();
        require(r.digest<ContentHashTag>() == content_hash(cfg), ErrorCode::Decode, "config hash mismatch");
        Reader cr(cfg);
        ProtocolConfig config = ProtocolConfig::decode(cr);
        cr.expect_done();
        ledger.emplace(std::move(config));
    } catch (const Error& err) {
        chain_break(std::nullopt, std::string("ledger header: ") + err.what());
    }
    while (!r.done()) {
        const std::uint64_t seq = ledger->size();
        Event event;
        try {
            Bytes raw = r.blob();
            const ContentHash stored = r.digest<ContentHashTag>();
            require(content_hash(raw) == stored, ErrorCode::Decode, "stored hash does not match event bytes");
            event = Event::decode(raw);
        } catch (const Error& err) {
            chain_break(seq, err.what());
        }
        ledger->append(std::move(event));
    }
    return std::move(*ledger);
}

void Ledger::save(const std::filesystem::path& path) const {
    const Bytes bytes = serialize();
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(os), ErrorCode::Io, "cannot write " + tmp.string());
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        require(static_cast<bool>(os), ErrorCode::Io, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Ledger Ledger::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot read " + path.string());
    Bytes bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    return deserialize(bytes);
}

std::string Ledger::render_text() const {
    std::string out;
    for (std::size_t i = 0; i < events_.size(); ++i) {
        out += events_[i].describe();
        out += " hash=";
        out += hashes_[i].hex();
        out += '\n';
    }
    return out;
}

State replay(const std::vector<Event>& events, const ProtocolConfig& config) {
    Ledger ledger(config);
    for (const Event& e : events) ledger.append(e);
    return ledger.state();
}

}  // namespace principia
