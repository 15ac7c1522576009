#pragma once

// Persons are public keys. Two signature schemes are bound behind one
// interface: Ed25519 for realistic runs and a keyed-hash test scheme that is
// cheap enough for thousands of simulated agents. The test scheme is NOT
// secure (anyone holding the public key can forge); it exists only so that
// property tests and large simulations stay fast.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "principia/digest.hpp"

namespace principia {

enum class Scheme : std::uint8_t {
    Ed25519 = 1,
    TestHmac = 2,
};

std::string_view scheme_name(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);  // throws Error(InvalidKey)

using Seed = std::array<std::uint8_t, 32>;

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
    Scheme scheme = Scheme::Ed25519;

    PersonId id() const;
};

struct Signature {
    PersonId signer;
    ContentHash payload_hash;
    Bytes bytes;

    bool operator==(const Signature&) const = default;
};

/// SHA-256 of the given bytes.
ContentHash content_hash(ByteView bytes);
inline ContentHash content_hash(std::string_view s) { return content_hash(as_bytes(s)); }

/// Fingerprint of a public key under a scheme.
PersonId person_id(Scheme scheme, ByteView public_key);

KeyPair keygen(const Seed& seed, Scheme scheme = Scheme::Ed25519);

/// Convenience: seed = SHA-256(label). Used by scenarios and tests.
KeyPair keygen_from_label(std::string_view label, Scheme scheme = Scheme::Ed25519);

Signature sign(const KeyPair& key, ByteView message);

/// False on any mismatch, including a malformed public key.
bool verify(Scheme scheme, ByteView public_key, ByteView message, const Signature& sig);

struct RegisteredKey {
    Scheme scheme = Scheme::Ed25519;
    Bytes public_key;
    bool validated = false;

    bool operator==(const RegisteredKey&) const = default;
};

/// Public keys known to the protocol, keyed by fingerprint.
class KeyRegistry {
public:
    void add(const RegisteredKey& key);
    const RegisteredKey* find(const PersonId& id) const;
    bool contains(const PersonId& id) const { return find(id) != nullptr; }
    void set_validated(const PersonId& id, bool validated);

    bool verify(ByteView message, const Signature& sig) const;

    const std::map<PersonId, RegisteredKey>& entries() const { return keys_; }

    /// One record per line: `fingerprint_hex scheme pubkey_hex validated`.
    void write(std::ostream& os) const;
    static KeyRegistry read(std::istream& is);

private:
    std::map<PersonId, RegisteredKey> keys_;
};

/// Secret key file: `scheme secret_hex public_hex`.
void save_keypair(const std::filesystem::path& path, const KeyPair& key);
KeyPair load_keypair(const std::filesystem::path& path);

}  // namespace principia
