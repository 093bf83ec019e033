#pragma once

// Little-endian byte streams for archive sections.

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "wsds/bits.hpp"
#include "wsds/common.hpp"

namespace wsds {

class ByteWriter {
 public:
  void put_u8(uint8_t v) { buf_.push_back(v); }
  void put_u32(uint32_t v) { put_le(v, 4); }
  void put_u64(uint64_t v) { put_le(v, 8); }
  void put_bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void put_words(std::span<const uint64_t> words) {
    for (uint64_t w : words) put_u64(w);
  }
  /// Count-prefixed word array.
  void put_word_array(std::span<const uint64_t> words) {
    put_u64(words.size());
    put_words(words);
  }
  /// PackedList form: width u8, count u64, then the words.
  void put_packed(const PackedList& list) {
    put_u8(static_cast<uint8_t>(list.width()));
    put_u64(list.size());
    put_words(list.words());
  }
  void put_bitvector(const PackedBitVector& bv) {
    put_u8(1);
    put_u64(bv.size());
    put_words(bv.words());
  }

  /// Tag byte followed by a u64 byte length and the section body.
  void put_section(uint8_t tag, const ByteWriter& body) {
    put_u8(tag);
    put_u64(body.buf_.size());
    put_bytes(body.buf_);
  }

  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  void put_le(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() { return static_cast<uint8_t>(le(1)); }
  uint32_t u32() { return static_cast<uint32_t>(le(4)); }
  uint64_t u64() { return le(8); }

  std::span<const uint8_t> bytes(uint64_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::vector<uint64_t> words(uint64_t n) {
    if (n > remaining() / 8) throw CorruptArchive("truncated word array");
    std::vector<uint64_t> out(n);
    for (auto& w : out) w = u64();
    return out;
  }
  std::vector<uint64_t> word_array() { return words(u64()); }

  PackedList packed() {
    const unsigned width = u8();
    const uint64_t count = u64();
    if (width < 1 || width > 64) throw CorruptArchive("bad packed list width");
    if (count > (remaining() * 8) / width + 64) throw CorruptArchive("packed list count too large");
    auto w = words(words_for_bits(count * width));
    check_tail(w, count * width);
    return PackedList::from_buffer(BitBuffer::from_words(std::move(w), count * width), count, width);
  }
  PackedBitVector bitvector() {
    const unsigned width = u8();
    if (width != 1) throw CorruptArchive("bit vector with width != 1");
    const uint64_t count = u64();
    if (count > remaining() * 8 + 64) throw CorruptArchive("bit vector too large");
    auto w = words(words_for_bits(count));
    check_tail(w, count);
    return PackedBitVector(BitBuffer::from_words(std::move(w), count));
  }

  /// Reads a section header and returns a reader over its body.
  ByteReader section(uint8_t expected_tag) {
    const uint8_t tag = u8();
    if (tag != expected_tag)
      throw CorruptArchive("expected section tag " + std::to_string(expected_tag) + ", found " +
                           std::to_string(tag));
    const uint64_t len = u64();
    return ByteReader(bytes(len));
  }

  uint64_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }
  void expect_end() const {
    if (!at_end()) throw CorruptArchive("trailing bytes in section");
  }

 private:
  void need(uint64_t n) const {
    if (n > remaining()) throw CorruptArchive("unexpected end of archive");
  }
  uint64_t le(int n) {
    need(n);
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += n;
    return v;
  }
  static void check_tail(const std::vector<uint64_t>& w, uint64_t bits) {
    if ((bits & 63) && (w.back() & ~low_mask(bits & 63))) throw CorruptArchive("nonzero trailing bits");
  }

  std::span<const uint8_t> data_;
  uint64_t pos_ = 0;
};

}  // namespace wsds
