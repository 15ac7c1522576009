#include "principia/canonical.hpp"

#include "principia/error.hpp"

namespace principia {

namespace {
// No protocol collection comes close to this; a larger count is corruption.
constexpr std::uint32_t kMaxCount = 1u << 24;
}  // namespace

void Reader::need(std::size_t n) const {
    if (remaining() < n) {
        fail(ErrorCode::Decode, "truncated input: need " + std::to_string(n) + " bytes at offset " +
                                    std::to_string(pos_) + ", have " + std::to_string(remaining()));
    }
}

std::uint64_t Reader::be(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
        v = v << 8 | data_[pos_++];
    }
    return v;
}

std::uint8_t Reader::u8() {
    need(1);
    return data_[pos_++];
}

bool Reader::boolean() {
    std::uint8_t v = u8();
    require(v <= 1, ErrorCode::Decode, "invalid boolean byte");
    return v == 1;
}

ByteView Reader::raw(std::size_t n) {
    need(n);
    ByteView out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

Bytes Reader::blob() {
    std::uint32_t n = u32();
    ByteView r = raw(n);
    return Bytes(r.begin(), r.end());
}

std::string Reader::str() {
    std::uint32_t n = u32();
    ByteView r = raw(n);
    return std::string(r.begin(), r.end());
}

std::uint32_t Reader::count() {
    std::uint32_t n = u32();
    require(n <= kMaxCount && n <= remaining(), ErrorCode::Decode,
            "implausible collection count " + std::to_string(n));
    return n;
}

void Reader::expect_done() const {
    require(done(), ErrorCode::Decode,
            "trailing bytes: " + std::to_string(remaining()) + " unread");
}

}  // namespace principia
