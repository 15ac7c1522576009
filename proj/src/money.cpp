#include "principia/money.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "principia/error.hpp"

namespace principia {

namespace {

// Parses "[-]int[.frac]" into an integer scaled by 10^6.
std::int64_t parse_scaled(std::string_view text, std::string_view what, ErrorCode code) {
    auto bad = [&] { fail(code, "invalid " + std::string(what) + " '" + std::string(text) + "'"); };
    if (text.empty()) bad();
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-') {
        negative = true;
        i = 1;
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_digit = false;
    bool in_frac = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' && !in_frac) {
            in_frac = true;
            continue;
        }
        if (c < '0' || c > '9') bad();
        seen_digit = true;
        if (in_frac) {
            if (++frac_digits > 6) bad();
            frac = frac * 10 + (c - '0');
        } else {
            if (whole > (INT64_MAX / kMicroPerUnit) / 10) bad();
            whole = whole * 10 + (c - '0');
        }
    }
    if (!seen_digit) bad();
    for (int k = frac_digits; k < 6; ++k) frac *= 10;
    std::int64_t v = whole * kMicroPerUnit + frac;
    return negative ? -v : v;
}

}  // namespace

std::string Fraction::str() const {
    std::string frac = std::to_string(ppm % kMicroPerUnit);
    frac.insert(0, 6 - frac.size(), '0');
    while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
    return std::to_string(ppm / kMicroPerUnit) + "." + frac;
}

Fraction Fraction::from_ppm(std::uint32_t ppm) {
    require(ppm <= kMicroPerUnit, ErrorCode::BadParams, "fraction above 1");
    return Fraction{ppm};
}

Fraction Fraction::from_double(double v) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorCode::BadParams,
            "fraction outside [0,1]");
    return Fraction{static_cast<std::uint32_t>(std::llround(v * kMicroPerUnit))};
}

Fraction Fraction::parse(std::string_view text) {
    std::int64_t v = parse_scaled(text, "fraction", ErrorCode::BadParams);
    require(v >= 0 && v <= kMicroPerUnit, ErrorCode::BadParams,
            "fraction outside [0,1]: '" + std::string(text) + "'");
    return Fraction{static_cast<std::uint32_t>(v)};
}

Micro parse_credits(std::string_view text) {
    Micro v = parse_scaled(text, "amount", ErrorCode::Config);
    require(v >= 0, ErrorCode::Config, "negative amount '" + std::string(text) + "'");
    return v;
}

std::string format_credits(Micro amount) {
    std::string sign = amount < 0 ? "-" : "";
    std::uint64_t a = amount < 0 ? static_cast<std::uint64_t>(-(amount + 1)) + 1
                                 : static_cast<std::uint64_t>(amount);
    std::string frac = std::to_string(a % kMicroPerUnit);
    frac.insert(0, 6 - frac.size(), '0');
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return sign + std::to_string(a / kMicroPerUnit) + (frac.empty() ? "" : "." + frac);
}

std::vector<Micro> apportion(Micro total, std::span<const __int128> weights) {
    require(total >= 0, ErrorCode::PreconditionFailed, "apportion: negative total");
    __int128 sum = 0;
    for (auto w : weights) {
        require(w >= 0, ErrorCode::PreconditionFailed, "apportion: negative weight");
        sum += w;
    }
    require(sum > 0, ErrorCode::PreconditionFailed, "apportion: zero total weight");

    std::vector<Micro> shares(weights.size());
    std::vector<__int128> remainders(weights.size());
    Micro assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        __int128 scaled = static_cast<__int128>(total) * weights[i];
        shares[i] = static_cast<Micro>(scaled / sum);
        remainders[i] = scaled % sum;
        assigned += shares[i];
    }

    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    // leftover < number of parties, since each floor loses strictly less than one unit
    for (Micro left = total - assigned, k = 0; left > 0; --left, ++k) {
        ++shares[order[static_cast<std::size_t>(k)]];
    }
    return shares;
}

}  // namespace principia
