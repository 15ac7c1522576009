#include "workspace.hpp"

#include <fcntl.h>
#include <sodium.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "principia/textfmt.hpp"

namespace principia::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_bytes(const fs::path& path, ByteView bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(os), ErrorCode::Io, "cannot write " + tmp.string());
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        require(static_cast<bool>(os), ErrorCode::Io, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool valid_key_name(const std::string& name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    });
}

}  // namespace

Config Config::load(const fs::path& data_dir, const std::optional<fs::path>& file) {
    Config c;
    c.data_dir = data_dir;
    c.ledger_path = data_dir / "ledger.bin";
    c.blob_dir = data_dir / "blobs";

    fs::path path = file ? *file : data_dir / "config";
    if (!file && !fs::exists(path)) return c;
    c.source = path.string();
    const TextDocument doc = parse_text(read_text(path), path.string(), ErrorCode::Config);
    for (const TextSection& sec : doc.sections) {
        FieldReader f(doc, sec, ErrorCode::Config);
        if (sec.name == "config") {
            auto under_data = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : data_dir / p; };
            if (auto v = f.text("ledger")) c.ledger_path = under_data(*v);
            if (auto v = f.text("blobs")) c.blob_dir = under_data(*v);
            c.damping = f.real("damping", c.damping, 1e-6, 1.0);
            if (f.has("seed")) c.seed = static_cast<std::uint64_t>(f.integer("seed", 0, 0, INT64_MAX));
            auto& p = c.protocol;
            p.report_threshold = f.credits("report_threshold", p.report_threshold);
            p.reviewers_per_submission =
                static_cast<std::uint32_t>(f.integer("reviewers_per_submission", p.reviewers_per_submission, 3, 50));
            p.join_expiry_days = f.integer("join_expiry_days", p.join_expiry_days, 1, 100'000);
            p.initial_rs = f.credits("initial_rs", p.initial_rs);
            p.ema_weight = f.fraction("ema_weight", p.ema_weight);
            if (auto v = f.text("rs_update")) {
                if (*v == "additive") p.rs_update = RsUpdate::Additive;
                else if (*v == "ema") p.rs_update = RsUpdate::MovingAverage;
                else f.fail_at(0, "rs_update", "expected 'additive' or 'ema'");
            }
        } else if (sec.name == "thresholds") {
            for (const auto& e : f.entries()) {
                Micro v = 0;
                try {
                    v = parse_credits(e.value);
                } catch (const Error& err) {
                    f.fail_at(e.line, e.key, err.what());
                }
                if (e.key == "default") c.protocol.thresholds.default_points = v;
                else c.protocol.thresholds.by_field[e.key] = v;
            }
        } else {
            fail(ErrorCode::Config, fmt::format("{}:{}: unknown section [{}]", doc.source, sec.line, sec.name));
        }
        f.finish();
    }
    try {
        c.protocol.validate();
    } catch (const Error& e) {
        fail(ErrorCode::Config, c.source + ": " + e.what());
    }
    return c;
}

std::string Config::echo() const {
    std::string out;
    auto line = [&](std::string_view k, const auto& v) { out += fmt::format("config.{}={}\n", k, v); };
    line("source", source);
    line("data_dir", data_dir.string());
    line("ledger", ledger_path.string());
    line("blobs", blob_dir.string());
    line("damping", damping);
    line("seed", seed ? std::to_string(*seed) : std::string("(scenario)"));
    line("report_threshold", format_credits(protocol.report_threshold));
    line("reviewers_per_submission", protocol.reviewers_per_submission);
    line("threshold.default", format_credits(protocol.thresholds.default_points));
    for (const auto& [k, v] : protocol.thresholds.by_field) line("threshold." + k, format_credits(v));
    return out;
}

Workspace::Workspace(Config config) : config_(std::move(config)) {}

Workspace::~Workspace() {
    if (lock_fd_ >= 0) ::close(lock_fd_);
}

void Workspace::lock() {
    if (lock_fd_ >= 0) return;
    fs::create_directories(config_.data_dir);
    const fs::path path = config_.data_dir / "lock";
    lock_fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    require(lock_fd_ >= 0, ErrorCode::Io, "cannot open " + path.string());
    if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(lock_fd_);
        lock_fd_ = -1;
        fail(ErrorCode::Locked, "another process holds " + path.string());
    }
}

Ledger& Workspace::ledger() {
    if (!ledger_) {
        if (fs::exists(config_.ledger_path)) ledger_.emplace(Ledger::load(config_.ledger_path));
        else ledger_.emplace(config_.protocol);
    }
    return *ledger_;
}

void Workspace::save() {
    if (!ledger_) return;
    fs::create_directories(config_.ledger_path.parent_path());
    ledger_->save(config_.ledger_path);
}

fs::path Workspace::key_path(const std::string& name) const {
    require(valid_key_name(name), ErrorCode::InvalidKey, "invalid key name '" + name + "'");
    return config_.data_dir / "keys" / (name + ".key");
}

bool Workspace::has_key(const std::string& name) const { return fs::exists(key_path(name)); }

KeyPair Workspace::key(const std::string& name) const {
    const fs::path path = key_path(name);
    require(fs::exists(path), ErrorCode::InvalidKey, "no key named '" + name + "' in " + path.parent_path().string());
    return load_keypair(path);
}

void Workspace::save_key(const std::string& name, const KeyPair& key) const {
    const fs::path path = key_path(name);
    require(!fs::exists(path), ErrorCode::Duplicate, "key '" + name + "' already exists");
    fs::create_directories(path.parent_path());
    save_keypair(path, key);
    names_.reset();
    fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write);
}

std::map<PersonId, std::string> Workspace::key_names() const {
    std::map<PersonId, std::string> out;
    const fs::path dir = config_.data_dir / "keys";
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".key") continue;
        out[load_keypair(entry.path()).id()] = entry.path().stem().string();
    }
    return out;
}

PersonId Workspace::person(const std::string& ref) {
    if (valid_key_name(ref) && has_key(ref)) return key(ref).id();
    std::map<PersonId, int> known;
    for (const auto& [id, k] : ledger().state().keys().entries()) known[id] = 0;
    return resolve(known, ref, "person");
}

std::string Workspace::name_of(const PersonId& id) const {
    if (!names_) names_ = key_names();
    auto it = names_->find(id);
    return it == names_->end() ? id.short_hex() : it->second;
}

ContentHash Workspace::put_blob(ByteView bytes) const {
    const ContentHash h = content_hash(bytes);
    fs::create_directories(config_.blob_dir);
    const fs::path path = config_.blob_dir / h.hex();
    if (!fs::exists(path)) write_bytes(path, bytes);
    return h;
}

ContentHash Workspace::put_file(const fs::path& file) const {
    std::ifstream is(file, std::ios::binary);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot read " + file.string());
    Bytes bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    return put_blob(bytes);
}

std::optional<Bytes> Workspace::get_blob(const ContentHash& hash) const {
    std::ifstream is(config_.blob_dir / hash.hex(), std::ios::binary);
    if (!is) return std::nullopt;
    Bytes bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    require(content_hash(bytes) == hash, ErrorCode::Io, "blob " + hash.hex() + " does not match its hash");
    return bytes;
}

ContentHash Workspace::pseudonym_salt() const {
    const fs::path path = config_.data_dir / "salt";
    if (fs::exists(path)) return ContentHash::from_hex(read_text(path).substr(0, 64));
    Bytes raw(32);
    randombytes_buf(raw.data(), raw.size());
    const ContentHash salt = content_hash(raw);
    fs::create_directories(config_.data_dir);
    const std::string hex = salt.hex() + "\n";
    write_bytes(path, as_bytes(hex));
    return salt;
}

}  // namespace principia::cli
