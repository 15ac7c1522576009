#pragma once

// The declarative text format shared by scenario and config files:
//
//   # comment
//   [section]
//   key = value        # trailing comment
//
// Sections may repeat. Errors name the source, line and field.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "principia/error.hpp"
#include "principia/money.hpp"

namespace principia {

struct TextEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct TextSection {
    std::string name;
    int line = 0;
    std::vector<TextEntry> entries;
};

struct TextDocument {
    std::string source;
    std::vector<TextSection> sections;
};

TextDocument parse_text(std::string_view text, std::string source, ErrorCode code);

/// Typed access to one section's fields. finish() rejects keys never read.
class FieldReader {
public:
    FieldReader(const TextDocument& doc, const TextSection& section, ErrorCode code);

    bool has(std::string_view key) const;
    std::optional<std::string> text(std::string_view key);
    std::string required(std::string_view key);
    std::int64_t integer(std::string_view key, std::int64_t fallback, std::int64_t lo, std::int64_t hi);
    double real(std::string_view key, double fallback, double lo, double hi);
    Micro credits(std::string_view key, Micro fallback);
    Fraction fraction(std::string_view key, Fraction fallback);
    bool flag(std::string_view key, bool fallback);
    std::vector<std::string> list(std::string_view key);

    /// Every key of the section, for free-form sections.
    const std::vector<TextEntry>& entries();

    [[noreturn]] void fail_at(int line, std::string_view key, const std::string& msg) const;
    void finish() const;

private:
    const TextEntry* find(std::string_view key) const;

    const TextDocument& doc_;
    const TextSection& section_;
    ErrorCode code_;
    std::set<std::string, std::less<>> used_;
};

std::vector<std::string> split_list(std::string_view text);

}  // namespace principia
