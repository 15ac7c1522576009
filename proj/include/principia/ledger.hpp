#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "principia/events.hpp"
#include "principia/state.hpp"

namespace principia {

/// Append-only, hash-chained, signed event log together with the state it
/// replays to. Single writer.
class Ledger {
public:
    explicit Ledger(ProtocolConfig config = {});

    const ProtocolConfig& config() const { return state_.config(); }
    const State& state() const { return state_; }
    const std::vector<Event>& events() const { return events_; }
    std::uint64_t size() const { return events_.size(); }

    /// Hash of the last event, or the all-zero digest for an empty log.
    ContentHash head() const;

    /// Fills seq/prev_hash for the next position and signs with `actor`.
    Event make_event(const KeyPair& actor, Day day, EventBody body) const;

    /// Checks chain link, actor signature and kind-specific preconditions,
    /// then applies. Errors: ChainBreak, BadSignature, or the precondition's
    /// own code; the error carries the event's seq and the ledger is unchanged.
    const Event& append(Event event);
    const Event& append(const KeyPair& actor, Day day, EventBody body);

    /// Runs every check of append() against a copy; the ledger is unchanged.
    void check(const Event& event) const;

    /// Called after every successful append (used by invariant checks and digests).
    void on_append(std::function<void(const Ledger&, const Event&)> hook) { hook_ = std::move(hook); }

    // --- persistence -------------------------------------------------------
    // File layout: magic "PRLG", u32 version, u32 config length, config bytes,
    // config hash (32), then per event: u32 length, event bytes, event hash (32).

    Bytes serialize() const;
    /// Decodes and replays; throws on the first invalid record with its seq.
    static Ledger deserialize(ByteView bytes);

    void save(const std::filesystem::path& path) const;
    static Ledger load(const std::filesystem::path& path);

    /// One canonical line per event.
    std::string render_text() const;

private:
    void verify_link_and_signature(const Event& event) const;

    State state_;
    std::vector<Event> events_;
    std::vector<ContentHash> hashes_;
    std::function<void(const Ledger&, const Event&)> hook_;
};

/// Rebuilds state from events alone, verifying everything.
State replay(const std::vector<Event>& events, const ProtocolConfig& config = {});

}  // namespace principia
