#pragma once

// The CLI's on-disk workspace: one data directory holding the ledger, the
// blob store, secret keys and an optional config file.
//
//   <data>/ledger.bin     hash-chained event log
//   <data>/blobs/<hex>    content-addressed papers and reports
//   <data>/keys/<name>.key
//   <data>/config         same text format as scenarios
//   <data>/lock           held with flock() while a command runs

#include <fmt/format.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "principia/error.hpp"
#include "principia/ledger.hpp"
#include "principia/reputation.hpp"

namespace principia::cli {

struct Config {
    std::filesystem::path data_dir;
    std::filesystem::path ledger_path;
    std::filesystem::path blob_dir;
    ProtocolConfig protocol;
    double damping = 0.5;
    std::optional<std::uint64_t> seed;
    std::string source = "(defaults)";

    /// `[config]` keys: ledger, blobs, damping, seed, report_threshold,
    /// reviewers_per_submission, join_expiry_days, initial_rs, rs_update,
    /// ema_weight; `[thresholds]` as in scenarios. Relative paths are taken
    /// from the data directory.
    static Config load(const std::filesystem::path& data_dir, const std::optional<std::filesystem::path>& file);
    /// key=value lines, for run summaries.
    std::string echo() const;
};

class Workspace {
public:
    explicit Workspace(Config config);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    const Config& config() const { return config_; }

    /// Takes the exclusive lock; throws Locked if another process holds it.
    void lock();

    /// Loads the ledger (or starts an empty one with the configured rules).
    Ledger& ledger();
    void save();

    // keys
    std::filesystem::path key_path(const std::string& name) const;
    bool has_key(const std::string& name) const;
    KeyPair key(const std::string& name) const;
    void save_key(const std::string& name, const KeyPair& key) const;
    /// Local key names by fingerprint.
    std::map<PersonId, std::string> key_names() const;
    /// A person by local key name or by fingerprint hex (prefix allowed).
    PersonId person(const std::string& ref);
    std::string name_of(const PersonId& id) const;

    // blobs
    ContentHash put_blob(ByteView bytes) const;
    ContentHash put_file(const std::filesystem::path& file) const;
    std::optional<Bytes> get_blob(const ContentHash& hash) const;

    /// Salt for rendering reviewer pseudonyms; created on first use.
    ContentHash pseudonym_salt() const;

private:
    Config config_;
    std::optional<Ledger> ledger_;
    int lock_fd_ = -1;
    mutable std::optional<std::map<PersonId, std::string>> names_;
};

/// Resolves a full hex id or a unique prefix (at least 4 characters) against `m`.
template <class Map>
typename Map::key_type resolve(const Map& m, const std::string& ref, const char* what) {
    using Key = typename Map::key_type;
    require(ref.size() >= 4, ErrorCode::UnknownEntity, fmt::format("{} id '{}' is too short", what, ref));
    std::optional<Key> found;
    for (const auto& [id, v] : m) {
        if (id.hex().rfind(ref, 0) != 0) continue;
        require(!found, ErrorCode::UnknownEntity, fmt::format("{} id '{}' is ambiguous", what, ref));
        found = id;
    }
    require(found.has_value(), ErrorCode::UnknownEntity, fmt::format("no {} matches '{}'", what, ref));
    return *found;
}

}  // namespace principia::cli
