#pragma once

// Canonical byte encoding for everything that is hashed or signed.
//
// Fields are written in declared order. Integers are fixed-width big-endian,
// strings and byte blobs carry a u32 length prefix, and unordered collections
// (sets, maps) are written as a count followed by the canonical encodings of
// their items sorted bytewise, so insertion order never leaks into a digest.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "principia/digest.hpp"

namespace principia {

class Writer {
public:
    Writer& u8(std::uint8_t v) {
        out_.push_back(v);
        return *this;
    }
    Writer& u32(std::uint32_t v) { return be(v, 4); }
    Writer& u64(std::uint64_t v) { return be(v, 8); }
    Writer& i64(std::int64_t v) { return be(static_cast<std::uint64_t>(v), 8); }
    Writer& boolean(bool v) { return u8(v ? 1 : 0); }

    Writer& str(std::string_view s) { return blob(as_bytes(s)); }

    Writer& blob(ByteView b) {
        u32(static_cast<std::uint32_t>(b.size()));
        out_.insert(out_.end(), b.begin(), b.end());
        return *this;
    }

    /// Fixed-size, no length prefix.
    Writer& raw(ByteView b) {
        out_.insert(out_.end(), b.begin(), b.end());
        return *this;
    }

    template <class Tag>
    Writer& digest(const Digest<Tag>& d) {
        return raw(d.bytes);
    }

    /// Ordered sequence: count, then items in the given order.
    template <class Range, class Fn>
    Writer& list(const Range& items, Fn&& encode_item) {
        u32(static_cast<std::uint32_t>(std::size(items)));
        for (const auto& item : items) {
            encode_item(*this, item);
        }
        return *this;
    }

    /// Unordered collection: count, then item encodings sorted bytewise.
    template <class Range, class Fn>
    Writer& collection(const Range& items, Fn&& encode_item) {
        std::vector<Bytes> encoded;
        encoded.reserve(std::size(items));
        for (const auto& item : items) {
            Writer w;
            encode_item(w, item);
            encoded.push_back(w.take());
        }
        std::sort(encoded.begin(), encoded.end());
        u32(static_cast<std::uint32_t>(encoded.size()));
        for (const auto& e : encoded) {
            raw(e);
        }
        return *this;
    }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Writer& be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
        return *this;
    }

    Bytes out_;
};

class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
    std::uint64_t u64() { return be(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(be(8)); }
    bool boolean();
    std::string str();
    Bytes blob();
    ByteView raw(std::size_t n);

    template <class Tag>
    Digest<Tag> digest() {
        Digest<Tag> d;
        auto r = raw(Digest<Tag>::kSize);
        std::copy(r.begin(), r.end(), d.bytes.begin());
        return d;
    }

    /// Reads a count written by list()/collection(); guards against absurd counts.
    std::uint32_t count();

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

private:
    std::uint64_t be(int width);
    void need(std::size_t n) const;

    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace principia
