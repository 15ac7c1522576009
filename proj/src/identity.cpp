#include "principia/identity.hpp"

#include <sodium.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "principia/canonical.hpp"
#include "principia/error.hpp"

namespace principia {

namespace {

void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) {
        fail(ErrorCode::InvalidKey, "libsodium failed to initialise");
    }
}

constexpr std::string_view kTestPublicDomain = "principia.test-hmac.pk";

std::array<std::uint8_t, 32> hmac(ByteView key, ByteView message) {
    std::array<std::uint8_t, 32> out{};
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, message.data(), message.size());
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
}

void check_key(const KeyPair& key) {
    switch (key.scheme) {
        case Scheme::Ed25519:
            require(key.public_key.size() == crypto_sign_PUBLICKEYBYTES &&
                        key.secret_key.size() == crypto_sign_SECRETKEYBYTES,
                    ErrorCode::InvalidKey, "malformed ed25519 key");
            return;
        case Scheme::TestHmac:
            require(key.public_key.size() == 32 && key.secret_key.size() == 32,
                    ErrorCode::InvalidKey, "malformed test-hmac key");
            return;
    }
    fail(ErrorCode::InvalidKey, "unknown signature scheme");
}

}  // namespace

void throw_digest_length(std::size_t got) {
    fail(ErrorCode::Decode, "expected 32-byte digest, got " + std::to_string(got) + " bytes");
}

std::string to_hex(ByteView bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    require(hex.size() % 2 == 0, ErrorCode::Decode, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        require(hi >= 0 && lo >= 0, ErrorCode::Decode, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string_view scheme_name(Scheme s) noexcept {
    switch (s) {
        case Scheme::Ed25519: return "ed25519";
        case Scheme::TestHmac: return "test-hmac";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "ed25519") return Scheme::Ed25519;
    if (name == "test-hmac" || name == "test") return Scheme::TestHmac;
    fail(ErrorCode::InvalidKey, "unknown signature scheme '" + std::string(name) + "'");
}

ContentHash content_hash(ByteView bytes) {
    ensure_sodium();
    ContentHash h;
    crypto_hash_sha256(h.bytes.data(), bytes.data(), bytes.size());
    return h;
}

PersonId person_id(Scheme scheme, ByteView public_key) {
    Writer w;
    w.str("principia.person").u8(static_cast<std::uint8_t>(scheme)).blob(public_key);
    return PersonId::from(content_hash(w.bytes()));
}

PersonId KeyPair::id() const { return person_id(scheme, public_key); }

KeyPair keygen(const Seed& seed, Scheme scheme) {
    ensure_sodium();
    KeyPair kp;
    kp.scheme = scheme;
    switch (scheme) {
        case Scheme::Ed25519:
            kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
            kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
            crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
            break;
        case Scheme::TestHmac: {
            kp.secret_key.assign(seed.begin(), seed.end());
            auto pk = hmac(as_bytes(kTestPublicDomain), seed);
            kp.public_key.assign(pk.begin(), pk.end());
            break;
        }
        default:
            fail(ErrorCode::InvalidKey, "unknown signature scheme");
    }
    return kp;
}

KeyPair keygen_from_label(std::string_view label, Scheme scheme) {
    return keygen(content_hash(label).bytes, scheme);
}

Signature sign(const KeyPair& key, ByteView message) {
    check_key(key);
    Signature sig;
    sig.signer = key.id();
    sig.payload_hash = content_hash(message);
    switch (key.scheme) {
        case Scheme::Ed25519: {
            sig.bytes.resize(crypto_sign_BYTES);
            crypto_sign_detached(sig.bytes.data(), nullptr, sig.payload_hash.bytes.data(),
                                 sig.payload_hash.bytes.size(), key.secret_key.data());
            break;
        }
        case Scheme::TestHmac: {
            auto mac = hmac(key.public_key, sig.payload_hash.bytes);
            sig.bytes.assign(mac.begin(), mac.end());
            break;
        }
    }
    return sig;
}

bool verify(Scheme scheme, ByteView public_key, ByteView message, const Signature& sig) {
    ensure_sodium();
    if (sig.signer != person_id(scheme, public_key)) {
        return false;
    }
    if (sig.payload_hash != content_hash(message)) {
        return false;
    }
    switch (scheme) {
        case Scheme::Ed25519:
            if (public_key.size() != crypto_sign_PUBLICKEYBYTES ||
                sig.bytes.size() != crypto_sign_BYTES) {
                return false;
            }
            return crypto_sign_verify_detached(sig.bytes.data(), sig.payload_hash.bytes.data(),
                                               sig.payload_hash.bytes.size(),
                                               public_key.data()) == 0;
        case Scheme::TestHmac: {
            if (public_key.size() != 32 || sig.bytes.size() != 32) {
                return false;
            }
            auto mac = hmac(public_key, sig.payload_hash.bytes);
            return sodium_memcmp(mac.data(), sig.bytes.data(), mac.size()) == 0;
        }
    }
    return false;
}

// --- registry ---------------------------------------------------------------

void KeyRegistry::add(const RegisteredKey& key) {
    keys_[person_id(key.scheme, key.public_key)] = key;
}

const RegisteredKey* KeyRegistry::find(const PersonId& id) const {
    auto it = keys_.find(id);
    return it == keys_.end() ? nullptr : &it->second;
}

void KeyRegistry::set_validated(const PersonId& id, bool validated) {
    auto it = keys_.find(id);
    require(it != keys_.end(), ErrorCode::UnknownEntity, "unregistered key " + id.short_hex());
    it->second.validated = validated;
}

bool KeyRegistry::verify(ByteView message, const Signature& sig) const {
    const RegisteredKey* key = find(sig.signer);
    return key != nullptr && principia::verify(key->scheme, key->public_key, message, sig);
}

void KeyRegistry::write(std::ostream& os) const {
    for (const auto& [id, key] : keys_) {
        os << id.hex() << ' ' << scheme_name(key.scheme) << ' ' << to_hex(key.public_key) << ' '
           << (key.validated ? "true" : "false") << '\n';
    }
}

KeyRegistry KeyRegistry::read(std::istream& is) {
    KeyRegistry reg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        std::string fp, scheme, pk, validated;
        if (!(fields >> fp >> scheme >> pk >> validated) ||
            (validated != "true" && validated != "false")) {
            fail(ErrorCode::Decode, "key registry line " + std::to_string(lineno) + ": malformed");
        }
        RegisteredKey key{parse_scheme(scheme), from_hex(pk), validated == "true"};
        require(person_id(key.scheme, key.public_key) == PersonId::from_hex(fp), ErrorCode::InvalidKey,
                "key registry line " + std::to_string(lineno) + ": fingerprint does not match key");
        reg.add(key);
    }
    return reg;
}

void save_keypair(const std::filesystem::path& path, const KeyPair& key) {
    std::ofstream os(path, std::ios::trunc);
    require(static_cast<bool>(os), ErrorCode::Io, "cannot write " + path.string());
    os << scheme_name(key.scheme) << ' ' << to_hex(key.secret_key) << ' ' << to_hex(key.public_key)
       << '\n';
}

KeyPair load_keypair(const std::filesystem::path& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot read " + path.string());
    std::string scheme, sk, pk;
    require(static_cast<bool>(is >> scheme >> sk >> pk), ErrorCode::InvalidKey,
            "malformed key file " + path.string());
    KeyPair kp{from_hex(pk), from_hex(sk), parse_scheme(scheme)};
    check_key(kp);
    return kp;
}

}  // namespace principia
