#pragma once

// Generalized rank (rank_le) and per-character select over a packed sequence of
// b-bit symbols, sigma <= 16.
//
// Rank: every R symbols the sigma cumulative counts (symbols <= c) are stored
// absolutely, every u symbols relative to the range start. Inside a sub-range
// the count comes from a broadword comparison over the packed fields.
//
// Select: one SampledSelect per character over word units.

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "wsds/bits.hpp"
#include "wsds/io.hpp"
#include "wsds/par.hpp"
#include "wsds/rsb.hpp"
#include "wsds/select_core.hpp"
#include "wsds/tables.hpp"

namespace wsds {

inline constexpr unsigned kMaxGeneralSigma = 16;

namespace swar {

/// Mask with bit k*b set for every k.
inline uint64_t field_lsbs(unsigned b) {
  uint64_t m = 0;
  for (unsigned k = 0; k < 64; k += b) m |= uint64_t{1} << k;
  return m;
}

/// Bit k*b set iff field k of x equals c (fields of width b, all of x).
inline uint64_t eq_marks(uint64_t x, unsigned b, unsigned c, uint64_t lsbs) {
  uint64_t eq = lsbs;
  for (unsigned k = 0; k < b; ++k) {
    const uint64_t xk = (x >> k) & lsbs;
    eq &= ((c >> k) & 1) ? xk : ~xk;
  }
  return eq;
}

/// Bit k*b set iff field k of x is <= c.
inline uint64_t le_marks(uint64_t x, unsigned b, unsigned c, uint64_t lsbs) {
  uint64_t gt = 0;
  uint64_t eq = lsbs;
  for (unsigned k = b; k-- > 0;) {
    const uint64_t xk = (x >> k) & lsbs;
    if ((c >> k) & 1) {
      eq &= xk;
    } else {
      gt |= eq & xk;
      eq &= ~xk;
    }
  }
  return lsbs & ~gt;
}

}  // namespace swar

/// Occurrences of one character, word by word (floor(64/b) symbols per unit).
class SymbolSource {
 public:
  SymbolSource(const PackedList& seq, unsigned c, const WordTables& tables)
      : seq_(&seq),
        c_(c),
        b_(seq.width()),
        per_(64 / seq.width()),
        lsbs_(swar::field_lsbs(seq.width())),
        tables_(&tables) {}

  uint64_t unit_len() const { return per_; }
  uint64_t length() const { return seq_->size(); }

  uint64_t marks(uint64_t u, unsigned lo, unsigned hi) const {
    const uint64_t x = seq_->bits().extract(u * per_ * b_, (hi * b_));
    return swar::eq_marks(x, b_, c_, lsbs_) & low_mask(hi * b_) & ~low_mask(lo * b_);
  }
  uint64_t count(uint64_t u, unsigned lo, unsigned hi, uint64_t* ops) const {
    *ops += 1 + b_;
    return std::popcount(marks(u, lo, hi));
  }
  unsigned select(uint64_t u, unsigned lo, uint64_t j, uint64_t* ops) const {
    const uint64_t n = seq_->size();
    const unsigned hi = static_cast<unsigned>(std::min<uint64_t>(per_, n - u * per_));
    *ops += 1 + b_;
    return tables_->select_in_word(marks(u, lo, hi), j, ops) / b_;
  }
  template <class F>
  void for_each(uint64_t u, unsigned lo, unsigned hi, F&& f, uint64_t* ops) const {
    uint64_t m = marks(u, lo, hi);
    *ops += 1 + b_;
    while (m) {
      f(static_cast<unsigned>(std::countr_zero(m)) / b_);
      m &= m - 1;
    }
  }

 private:
  const PackedList* seq_;
  unsigned c_;
  unsigned b_;
  unsigned per_;
  uint64_t lsbs_;
  const WordTables* tables_;
};

/// Positions of the first and last occurrence seen; kNone when absent.
/// Combining a window with a later one keeps the earlier first and the later last.
struct OccurrenceWindow {
  static constexpr uint64_t kNone = ~uint64_t{0};
  uint64_t first = kNone;
  uint64_t last = kNone;

  friend OccurrenceWindow operator+(const OccurrenceWindow& a, const OccurrenceWindow& b) {
    return {a.first != kNone ? a.first : b.first, b.last != kNone ? b.last : a.last};
  }
  bool operator==(const OccurrenceWindow&) const = default;
};

/// Symbol width for an alphabet of sigma characters.
inline unsigned symbol_width(uint64_t sigma) { return std::max(1u, ceil_log2(sigma)); }

class GeneralRS {
 public:
  using Counts = std::array<uint64_t, kMaxGeneralSigma>;

  GeneralRS() = default;

  static GeneralRS build(CostMeter& meter, PackedList seq, unsigned sigma, const SizeParams& params,
                         std::shared_ptr<const WordTables> words, std::shared_ptr<const SymbolTables> symbols);
  /// Standalone build: parameters from the sequence's own length, tables charged.
  static GeneralRS build(CostMeter& meter, PackedList seq, unsigned sigma);
  static GeneralRS build(PackedList seq, unsigned sigma);

  uint64_t size() const { return seq_.size(); }
  unsigned sigma() const { return sigma_; }
  const PackedList& seq() const { return seq_; }
  unsigned operator[](uint64_t i) const { return static_cast<unsigned>(seq_[i]); }
  uint64_t range_len() const { return R_; }
  uint64_t sub_len() const { return u_; }
  const SampledSelect& select_side(unsigned c) const { return sel_[c]; }

  /// |{p <= i : seq[p] <= c}|.
  uint64_t rank_le(unsigned c, uint64_t i) const;
  /// |{p <= i : seq[p] == c}|.
  uint64_t rank(unsigned c, uint64_t i) const;
  uint64_t count(unsigned c) const;
  /// 0-based position of the j'th occurrence of c.
  uint64_t select(unsigned c, uint64_t j) const;

  void save(ByteWriter& out) const;
  static GeneralRS load(ByteReader& in);

  uint64_t overhead_bytes() const;

  bool operator==(const GeneralRS& o) const {
    return seq_ == o.seq_ && sigma_ == o.sigma_ && params_ == o.params_ && R_ == o.R_ && u_ == o.u_ &&
           ranges_ == o.ranges_ && subs_ == o.subs_ && sel_ == o.sel_;
  }

 private:
  uint64_t rank_le_unchecked(unsigned c, uint64_t i) const;

  PackedList seq_;
  unsigned sigma_ = 1;
  SizeParams params_;
  uint64_t R_ = 1;
  uint64_t u_ = 1;
  std::vector<uint64_t> ranges_;  // sigma per range
  PackedList subs_;               // sigma per sub-range
  std::vector<SampledSelect> sel_;
  std::shared_ptr<const WordTables> words_;
};

struct GeneralRankParts {
  uint64_t R = 1;
  uint64_t u = 1;
  std::vector<uint64_t> ranges;
  PackedList subs;
  GeneralRS::Counts totals{};
};

GeneralRankParts build_general_rank(CostMeter& meter, const PackedList& seq, unsigned sigma);
std::vector<SampledSelect> build_general_select(CostMeter& meter, const PackedList& seq, unsigned sigma,
                                                const SizeParams& params, const WordTables& words,
                                                const SymbolTables& symbols);

/// Symbols per rank sub-range and per rank range for b-bit symbols.
uint64_t general_sub_len(unsigned b);
uint64_t general_range_len(unsigned sigma, unsigned b);

}  // namespace wsds
