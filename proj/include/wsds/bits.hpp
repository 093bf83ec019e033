#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsds/common.hpp"
#include "wsds/par.hpp"

namespace wsds {

/// Append-only stream of bits over 64-bit words, bit i at word i/64, position i%64.
/// Bits at positions >= size() in the last word are always zero.
class BitBuffer {
 public:
  BitBuffer() = default;
  explicit BitBuffer(uint64_t bits) : words_(words_for_bits(bits), 0), bits_(bits) {}

  uint64_t size_bits() const { return bits_; }
  std::span<const uint64_t> words() const { return words_; }

  bool bit(uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  /// Reads len <= 64 bits starting at pos (pos + len <= size_bits()).
  uint64_t extract(uint64_t pos, unsigned len) const {
    if (len == 0) return 0;
    const uint64_t w = pos >> 6;
    const unsigned off = pos & 63;
    uint64_t v = words_[w] >> off;
    if (off + len > 64) v |= words_[w + 1] << (64 - off);
    return v & low_mask(len);
  }

  /// Appends the low len bits of value; returns 1 if a word was completed.
  unsigned append_bits(uint64_t value, unsigned len) {
    if (len == 0) return 0;
    value &= low_mask(len);
    const unsigned off = bits_ & 63;
    if (off == 0) words_.push_back(0);
    words_.back() |= value << off;
    unsigned completed = 0;
    if (off + len >= 64) {
      completed = 1;
      if (off + len > 64) words_.push_back(value >> (64 - off));
    }
    bits_ += len;
    return completed;
  }

  /// Overwrites len bits at pos (pos + len <= size_bits()).
  void write_bits(uint64_t pos, uint64_t value, unsigned len) {
    if (len == 0) return;
    value &= low_mask(len);
    const uint64_t w = pos >> 6;
    const unsigned off = pos & 63;
    words_[w] = (words_[w] & ~(low_mask(len) << off)) | (value << off);
    if (off + len > 64) {
      const unsigned spill = off + len - 64;
      words_[w + 1] = (words_[w + 1] & ~low_mask(spill)) | (value >> (64 - off));
    }
  }

  /// Appends all bits of other. Returns the number of output words touched.
  uint64_t append_buffer(const BitBuffer& other);

  void reserve_bits(uint64_t bits) { words_.reserve(words_for_bits(bits)); }

  /// Takes ownership of words; trailing bits are cleared.
  static BitBuffer from_words(std::vector<uint64_t> words, uint64_t bits);

  bool operator==(const BitBuffer&) const = default;

 protected:
  std::vector<uint64_t> words_;
  uint64_t bits_ = 0;
};

/// n bits packed into ceil(n/64) words; node bitmaps and the rank/select substrate.
class PackedBitVector : public BitBuffer {
 public:
  PackedBitVector() = default;
  explicit PackedBitVector(uint64_t n) : BitBuffer(n) {}
  explicit PackedBitVector(BitBuffer buf) : BitBuffer(std::move(buf)) {}

  static PackedBitVector from_bools(const std::vector<bool>& bits);
  /// Parses a string of '0'/'1' characters, first character is bit 0.
  static PackedBitVector from_string(std::string_view s);

  uint64_t size() const { return bits_; }
  bool operator[](uint64_t i) const { return bit(i); }
  void push_back(bool b) { append_bits(b ? 1 : 0, 1); }
  void set(uint64_t i, bool b) { write_bits(i, b ? 1 : 0, 1); }
  std::string to_string() const;

  bool operator==(const PackedBitVector&) const = default;
};

/// N integers of b bits each, element i at bits [i*b, (i+1)*b) of the stream.
class PackedList {
 public:
  PackedList() = default;
  explicit PackedList(unsigned width);
  PackedList(uint64_t count, unsigned width);

  static PackedList pack(std::span<const uint64_t> values, unsigned width);

  uint64_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  unsigned width() const { return width_; }
  std::span<const uint64_t> words() const { return bits_.words(); }
  const BitBuffer& bits() const { return bits_; }

  uint64_t get(uint64_t i) const;
  uint64_t operator[](uint64_t i) const { return bits_.extract(i * width_, width_); }
  void set(uint64_t i, uint64_t value);
  void push_back(uint64_t value);

  /// Appends `count` elements whose packed bits are the low count*width bits of raw.
  /// Returns ops charged: 1 plus 1 per completed output word.
  unsigned append_raw(uint64_t raw, unsigned count) {
    const unsigned done = bits_.append_bits(raw, count * width_);
    count_ += count;
    return 1 + done;
  }

  /// In-place append; charges 1 + ceil(other.size*width/64).
  void append(const PackedList& other, CostMeter& meter);

  /// Chunks of exactly k elements except possibly the last; charges per chunk.
  std::vector<PackedList> split(uint64_t k, CostMeter& meter) const;

  std::vector<uint64_t> unpack() const;

  static PackedList from_buffer(BitBuffer bits, uint64_t count, unsigned width);

  bool operator==(const PackedList&) const = default;

 private:
  BitBuffer bits_;
  uint64_t count_ = 0;
  unsigned width_ = 1;
};

PackedList append(const PackedList& a, const PackedList& b, CostMeter& meter);
PackedList append(const PackedList& a, const PackedList& b);

/// Chunk partition table for short lists: for every packed chunk of len <= cap
/// tau-bit elements and every t in [0, tau) it holds the len-bit bitmap of bit
/// (tau-1-t) of each element together with the order-preserving split into the
/// elements with that bit 0 (lo) and 1 (hi).
class ShortlistTable {
 public:
  struct Entry {
    uint16_t bitmap = 0;
    uint16_t lo = 0;
    uint16_t hi = 0;
    uint8_t lo_count = 0;
    uint8_t hi_count = 0;
  };

  static constexpr unsigned kMaxKeyBits = 16;

  ShortlistTable(unsigned tau, unsigned cap);

  unsigned tau() const { return tau_; }
  unsigned cap() const { return cap_; }

  const Entry& lookup(uint64_t chunk, unsigned len, unsigned t) const {
    return entries_[base_[len] + (uint64_t{t} << (len * tau_)) + chunk];
  }

  uint64_t entry_count() const { return entries_.size(); }
  uint64_t bytes() const { return entries_.size() * sizeof(Entry); }
  /// Work and span of constructing the table.
  const CostMeter& build_cost() const { return build_cost_; }

 private:
  unsigned tau_;
  unsigned cap_;
  std::vector<uint64_t> base_;
  std::vector<Entry> entries_;
  CostMeter build_cost_;
};

/// Default chunk capacity for tau-bit elements under a kappa-bit table key.
inline unsigned shortlist_cap(unsigned kappa, unsigned tau) { return std::max(1u, kappa / tau); }

}  // namespace wsds
