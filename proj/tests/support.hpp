#pragma once

#include <doctest.h>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "principia/client.hpp"
#include "principia/error.hpp"
#include "principia/ledger.hpp"

namespace test {

using namespace principia;

/// Error code thrown by `f`, or nullopt if it returned normally.
inline std::optional<ErrorCode> code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline Micro credits(std::int64_t n) { return n * kMicroPerUnit; }

/// A ledger with named test-scheme identities. "registrar" registers itself
/// on construction; everyone else is registered and funded through add().
struct World {
    Ledger ledger;
    std::map<std::string, KeyPair> keys;
    Day day = 0;

    explicit World(ProtocolConfig config = {}) : ledger(std::move(config)) {
        ledger.append(key("registrar"), day, key_register(key("registrar"), true));
    }

    const KeyPair& key(const std::string& name) {
        auto it = keys.find(name);
        if (it == keys.end()) it = keys.emplace(name, keygen_from_label(name, Scheme::TestHmac)).first;
        return it->second;
    }
    PersonId id(const std::string& name) { return key(name).id(); }

    std::vector<KeyPair> keys_of(const std::vector<std::string>& names) {
        std::vector<KeyPair> out;
        for (const auto& n : names) out.push_back(key(n));
        return out;
    }

    void add(const std::string& name, Micro amount = 0) {
        ledger.append(key("registrar"), day, key_register(key(name), true));
        if (amount > 0) ledger.append(key("registrar"), day, Mint{id(name), amount});
    }

    const Event& act(const std::string& name, EventBody body) {
        return ledger.append(key(name), day, std::move(body));
    }

    std::optional<ErrorCode> try_act(const std::string& name, EventBody body) {
        return code_of([&] { act(name, std::move(body)); });
    }

    const State& state() const { return ledger.state(); }
    Micro balance(const std::string& name) { return state().balance(Owner::person(id(name))); }

    JournalId create_journal(const std::string& title, const std::vector<std::string>& founders,
                             JournalParams params = {}) {
        auto ks = keys_of(founders);
        act(founders.front(), journal_create(title, ks, params));
        std::set<PersonId> ids;
        for (const auto& k : ks) ids.insert(k.id());
        return Journal::make(title, ids, params, std::nullopt, day).id;
    }

    ContentHash publish(const std::string& paper, const std::vector<std::string>& authors,
                        std::set<std::string> keywords = {"topic"}, std::set<ContentHash> cites = {}) {
        ContentHash h = content_hash(paper);
        act(authors.front(), paper_publish(h, keys_of(authors), std::move(keywords), std::move(cites)));
        return h;
    }
};

}  // namespace test
