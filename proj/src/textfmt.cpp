#include "principia/textfmt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace principia {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = trim(text.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

TextDocument parse_text(std::string_view text, std::string source, ErrorCode code) {
    TextDocument doc{std::move(source), {}};
    int lineno = 0;
    while (!text.empty()) {
        ++lineno;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto where = [&] { return fmt::format("{}:{}", doc.source, lineno); };
        if (line.front() == '[') {
            require(line.back() == ']' && line.size() > 2, code, where() + ": malformed section header");
            doc.sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), lineno, {}});
            continue;
        }
        auto eq = line.find('=');
        require(eq != std::string_view::npos, code, where() + ": expected 'key = value'");
        require(!doc.sections.empty(), code, where() + ": field outside any section");
        TextEntry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), lineno};
        require(!e.key.empty(), code, where() + ": empty key");
        auto& entries = doc.sections.back().entries;
        require(std::none_of(entries.begin(), entries.end(), [&](const TextEntry& x) { return x.key == e.key; }),
                code, where() + ": field '" + e.key + "' given twice");
        entries.push_back(std::move(e));
    }
    return doc;
}

FieldReader::FieldReader(const TextDocument& doc, const TextSection& section, ErrorCode code)
    : doc_(doc), section_(section), code_(code) {}

const TextEntry* FieldReader::find(std::string_view key) const {
    for (const auto& e : section_.entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

void FieldReader::fail_at(int line, std::string_view key, const std::string& msg) const {
    fail(code_, fmt::format("{}:{}: [{}] field '{}': {}", doc_.source, line, section_.name, key, msg));
}

bool FieldReader::has(std::string_view key) const { return find(key) != nullptr; }

std::optional<std::string> FieldReader::text(std::string_view key) {
    const TextEntry* e = find(key);
    if (!e) return std::nullopt;
    used_.emplace(key);
    return e->value;
}

std::string FieldReader::required(std::string_view key) {
    auto v = text(key);
    if (!v) fail_at(section_.line, key, "required");
    return *v;
}

std::int64_t FieldReader::integer(std::string_view key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
    auto v = text(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) fail_at(find(key)->line, key, "expected an integer");
    if (out < lo || out > hi) fail_at(find(key)->line, key, fmt::format("must lie in [{}, {}]", lo, hi));
    return out;
}

double FieldReader::real(std::string_view key, double fallback, double lo, double hi) {
    auto v = text(key);
    if (!v) return fallback;
    double out = 0;
    try {
        std::size_t pos = 0;
        out = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        fail_at(find(key)->line, key, "expected a number");
    }
    if (!std::isfinite(out) || out < lo || out > hi) fail_at(find(key)->line, key, fmt::format("must lie in [{}, {}]", lo, hi));
    return out;
}

Micro FieldReader::credits(std::string_view key, Micro fallback) {
    auto v = text(key);
    if (!v) return fallback;
    try {
        return parse_credits(*v);
    } catch (const Error& e) {
        fail_at(find(key)->line, key, e.what());
    }
}

Fraction FieldReader::fraction(std::string_view key, Fraction fallback) {
    auto v = text(key);
    if (!v) return fallback;
    try {
        return Fraction::parse(*v);
    } catch (const Error& e) {
        fail_at(find(key)->line, key, e.what());
    }
}

bool FieldReader::flag(std::string_view key, bool fallback) {
    auto v = text(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    fail_at(find(key)->line, key, "expected true or false");
}

std::vector<std::string> FieldReader::list(std::string_view key) {
    auto v = text(key);
    return v ? split_list(*v) : std::vector<std::string>{};
}

const std::vector<TextEntry>& FieldReader::entries() {
    for (const auto& e : section_.entries) used_.insert(e.key);
    return section_.entries;
}

void FieldReader::finish() const {
    for (const auto& e : section_.entries) {
        if (!used_.contains(e.key)) fail_at(e.line, e.key, "unknown field");
    }
}

}  // namespace principia
