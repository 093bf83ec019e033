#pragma once

// Constant-time binary rank and select over a PackedBitVector.
//
// Rank: absolute rank1 at the start of every 4096-bit range (64 words), rank1
// relative to the range start at every word in 13-bit packed fields, and a
// popcount inside the word. Only rank1 is stored; rank0(i) = i + 1 - rank1(i).
//
// Select: one SampledSelect per bit value over word units; in-word positions
// come from kappa-bit block tables.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wsds/bits.hpp"
#include "wsds/io.hpp"
#include "wsds/par.hpp"
#include "wsds/select_core.hpp"
#include "wsds/tables.hpp"

namespace wsds {

inline constexpr uint64_t kRankRangeWords = 64;
inline constexpr unsigned kRankSubWidth = 13;  // holds values up to 4096

struct RankDirectory {
  std::vector<uint64_t> ranges;  // rank1 before each range
  PackedList subs{kRankSubWidth};  // rank1 before each word, relative to its range

  bool operator==(const RankDirectory&) const = default;
};

/// Occurrences of one bit value, word by word.
class BitSource {
 public:
  BitSource(const PackedBitVector& bits, bool value, const WordTables& tables)
      : bits_(&bits), flip_(value ? 0 : ~uint64_t{0}), tables_(&tables) {}

  uint64_t unit_len() const { return 64; }
  uint64_t length() const { return bits_->size(); }
  uint64_t units() const { return bits_->words().size(); }

  uint64_t word(uint64_t u) const { return bits_->words()[u] ^ flip_; }

  uint64_t count(uint64_t u, unsigned lo, unsigned hi, uint64_t* ops) const {
    ++*ops;
    return std::popcount(word(u) & span_mask(lo, hi));
  }
  unsigned select(uint64_t u, unsigned lo, uint64_t j, uint64_t* ops) const {
    return tables_->select_in_word(word(u) & ~low_mask(lo), j, ops);
  }
  template <class F>
  void for_each(uint64_t u, unsigned lo, unsigned hi, F&& f, uint64_t* ops) const {
    uint64_t w = word(u) & span_mask(lo, hi);
    ++*ops;
    while (w) {
      f(static_cast<unsigned>(std::countr_zero(w)));
      w &= w - 1;
    }
  }

 private:
  static uint64_t span_mask(unsigned lo, unsigned hi) { return low_mask(hi) & ~low_mask(lo); }

  const PackedBitVector* bits_;
  uint64_t flip_;
  const WordTables* tables_;
};

RankDirectory build_binary_rank(CostMeter& meter, const PackedBitVector& bits);
SampledSelect build_binary_select(CostMeter& meter, const PackedBitVector& bits, bool value,
                                  const SizeParams& params, const WordTables& tables);

class BinaryRS {
 public:
  BinaryRS() = default;

  /// Builds rank and both select sides. Table cost is charged by the caller
  /// that acquired the tables.
  static BinaryRS build(CostMeter& meter, PackedBitVector bits, const SizeParams& params,
                        std::shared_ptr<const WordTables> tables);
  /// Standalone build: parameters from the vector's own length, tables charged.
  static BinaryRS build(CostMeter& meter, PackedBitVector bits);
  static BinaryRS build(PackedBitVector bits);

  uint64_t size() const { return bits_.size(); }
  const PackedBitVector& bits() const { return bits_; }
  bool operator[](uint64_t i) const { return bits_[i]; }
  const SizeParams& params() const { return params_; }
  const RankDirectory& rank_directory() const { return rank_; }
  const SampledSelect& select_side(bool value) const { return sel_[value ? 1 : 0]; }

  /// Occurrences of v in [0, i]; i < size().
  uint64_t rank(bool v, uint64_t i) const;
  uint64_t rank1(uint64_t i) const { return rank(true, i); }
  uint64_t rank0(uint64_t i) const { return rank(false, i); }
  /// rank without the bounds check, for i < size().
  uint64_t rank1_unchecked(uint64_t i) const {
    const uint64_t w = i >> 6;
    return rank_.ranges[w / kRankRangeWords] + rank_.subs[w] +
           std::popcount(bits_.words()[w] & low_mask((i & 63) + 1));
  }

  uint64_t count(bool v) const { return v ? ones_ : size() - ones_; }

  /// 0-based position of the j'th occurrence of v, 1 <= j <= count(v).
  uint64_t select(bool v, uint64_t j) const;
  uint64_t select1(uint64_t j) const { return select(true, j); }
  uint64_t select0(uint64_t j) const { return select(false, j); }

  void save(ByteWriter& out) const;
  static BinaryRS load(ByteReader& in);

  /// Bytes of the auxiliary structures, excluding the bitmap.
  uint64_t overhead_bytes() const;

  bool operator==(const BinaryRS& o) const {
    return bits_ == o.bits_ && params_ == o.params_ && rank_ == o.rank_ && sel_[0] == o.sel_[0] &&
           sel_[1] == o.sel_[1];
  }

 private:
  PackedBitVector bits_;
  SizeParams params_;
  uint64_t ones_ = 0;
  RankDirectory rank_;
  SampledSelect sel_[2];
  std::shared_ptr<const WordTables> tables_;
};

/// Builds a PackedList of `count` fields where field i = value(i), one output
/// word per parallel task.
template <class ValueFn>
PackedList pack_parallel(CostMeter& meter, uint64_t count, unsigned width, ValueFn&& value) {
  const uint64_t total_bits = count * width;
  std::vector<uint64_t> words(words_for_bits(total_bits), 0);
  parallel_for(meter, words.size(), [&](size_t w, CostMeter& m) {
    const uint64_t lo_bit = uint64_t{w} * 64;
    const uint64_t hi_bit = std::min<uint64_t>(lo_bit + 64, total_bits);
    uint64_t acc = 0;
    uint64_t fields = 0;
    for (uint64_t f = lo_bit / width; f * width < hi_bit; ++f) {
      const uint64_t v = value(f) & low_mask(width);
      const uint64_t start = f * width;
      if (start >= lo_bit)
        acc |= v << (start - lo_bit);
      else
        acc |= v >> (lo_bit - start);
      ++fields;
    }
    words[w] = acc;
    m.charge(1 + fields);
  });
  return PackedList::from_buffer(BitBuffer::from_words(std::move(words), total_bits), count, width);
}

}  // namespace wsds
