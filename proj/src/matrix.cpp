#include <map>
#include <string>

#include "wsds/tables.hpp"
#include "wsds/var.hpp"

namespace wsds {

namespace {

enum : uint8_t { kTagAlphabet = 1, kTagLevel = 5 };

uint64_t reverse_bits(uint64_t v, unsigned t) {
  uint64_t r = 0;
  for (unsigned k = 0; k < t; ++k) r |= ((v >> k) & 1) << (t - 1 - k);
  return r;
}

}  // namespace

std::vector<PackedBitVector> build_matrix_levels(CostMeter& meter, std::span<const uint64_t> codes, unsigned h,
                                                 unsigned tau) {
  const uint64_t N = codes.size();
  const unsigned kappa = SizeParams::for_length(N).kappa;
  std::vector<PackedBitVector> levels(h);
  std::vector<uint64_t> x(codes.begin(), codes.end());
  std::map<unsigned, std::shared_ptr<const ShortlistTable>> tables;
  for (unsigned base = 0; base < h;) {
    const unsigned t = std::min(tau, h - base);
    auto& table = tables[t];
    if (!table) {
      table = TableRegistry::instance().shortlist(t, shortlist_cap(kappa, t));
      charge_table(meter, table->build_cost());
    }
    const unsigned shift = h - base - t;
    const uint64_t mask = low_mask(t);
    PackedList list = pack_parallel(meter, N, t, [&](uint64_t i) { return (x[i] >> shift) & mask; });
    for (unsigned s = 0; s < t; ++s) {
      const bool last = s + 1 == t;
      ShortlistSplit split = split_shortlist(meter, *table, s, list, last);
      levels[base + s] = std::move(split.bitmap);
      if (!last) list = append(split.lo, split.hi, meter);
    }
    if (base + t < h) {
      std::vector<SortItem> items(N);
      parallel_for(meter, (N + 4095) / 4096, [&](size_t b, CostMeter& m) {
        const uint64_t lo = b * 4096, hi = std::min<uint64_t>(N, lo + 4096);
        for (uint64_t i = lo; i < hi; ++i) items[i] = {reverse_bits((x[i] >> shift) & mask, t), x[i]};
        m.charge((2 + t) * (hi - lo));
      });
      auto sorted = stable_sort_by_key(meter, items, t);
      parallel_for(meter, (N + 4095) / 4096, [&](size_t b, CostMeter& m) {
        const uint64_t lo = b * 4096, hi = std::min<uint64_t>(N, lo + 4096);
        for (uint64_t i = lo; i < hi; ++i) x[i] = sorted[i].payload;
        m.charge(hi - lo);
      });
    }
    base += t;
  }
  return levels;
}

WaveletMatrix WaveletMatrix::build(CostMeter& meter, std::span<const uint64_t> raw, unsigned tau) {
  WaveletMatrix wm;
  MappedSequence ms = map_alphabet(raw);
  wm.map_ = std::move(ms.map);
  wm.n_ = raw.size();
  const CodeShape shape = CodeShape::balanced(wm.map_.size());
  const unsigned h = wm.map_.size() == 1 ? 0 : shape.height();
  wm.tau_ = resolve_tau(tau, wm.n_, shape.height());
  std::vector<uint64_t> codes = aligned_codes(meter, ms.codes, shape);
  std::vector<PackedBitVector> bits = build_matrix_levels(meter, codes, h, wm.tau_);

  const SizeParams p = SizeParams::for_length(wm.n_);
  auto tables = TableRegistry::instance().word(p.kappa);
  charge_table(meter, tables->build_cost());
  wm.levels_.resize(h);
  wm.zeros_.resize(h);
  parallel_for(meter, h, [&](size_t l, CostMeter& m) {
    wm.levels_[l] = BinaryRS::build(m, std::move(bits[l]), p, tables);
    wm.zeros_[l] = wm.levels_[l].count(false);
  });
  return wm;
}

uint64_t WaveletMatrix::structure_bytes() const {
  uint64_t b = map_.size() * 8 + zeros_.size() * 8;
  for (const auto& l : levels_) b += l.bits().words().size() * 8 + l.overhead_bytes();
  return b;
}

uint64_t WaveletMatrix::check_index(uint64_t i) const {
  if (i >= n_)
    throw IndexOutOfRange("index " + std::to_string(i) + " out of range for length " + std::to_string(n_));
  return i;
}

uint64_t WaveletMatrix::access_code(uint64_t i) const {
  check_index(i);
  uint64_t code = 0;
  for (unsigned l = 0; l < levels(); ++l) {
    const bool bit = levels_[l][i];
    i = bit ? zeros_[l] + levels_[l].rank1(i) - 1 : levels_[l].rank0(i) - 1;
    code = (code << 1) | bit;
  }
  return code;
}

uint64_t WaveletMatrix::rank_code(uint64_t c, uint64_t i) const {
  check_index(i);
  if (c >= sigma()) throw ContractViolation("rank: code " + std::to_string(c) + " outside alphabet");
  const unsigned h = levels();
  uint64_t s = 0, e = i + 1;
  for (unsigned l = 0; l < h && s < e; ++l) {
    const uint64_t os = ones_before(l, s), oe = ones_before(l, e);
    if ((c >> (h - 1 - l)) & 1) {
      s = zeros_[l] + os;
      e = zeros_[l] + oe;
    } else {
      s -= os;
      e -= oe;
    }
  }
  return e - s;
}

uint64_t WaveletMatrix::select_code(uint64_t c, uint64_t j) const {
  const uint64_t total = (c < sigma() && n_ > 0) ? rank_code(c, n_ - 1) : 0;
  if (j == 0 || j > total)
    throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range (count " + std::to_string(total) +
                               ")");
  const unsigned h = levels();
  uint64_t s = 0;
  for (unsigned l = 0; l < h; ++l) {
    const uint64_t os = ones_before(l, s);
    s = ((c >> (h - 1 - l)) & 1) ? zeros_[l] + os : s - os;
  }
  uint64_t p = s + j - 1;
  for (unsigned l = h; l-- > 0;) {
    if ((c >> (h - 1 - l)) & 1)
      p = levels_[l].select1(p - zeros_[l] + 1);
    else
      p = levels_[l].select0(p + 1);
  }
  return p;
}

uint64_t WaveletMatrix::rank_le_code(uint64_t c, uint64_t i) const {
  check_index(i);
  if (c >= sigma()) throw ContractViolation("rank_le: code " + std::to_string(c) + " outside alphabet");
  const unsigned h = levels();
  uint64_t s = 0, e = i + 1, res = 0;
  for (unsigned l = 0; l < h && s < e; ++l) {
    const uint64_t os = ones_before(l, s), oe = ones_before(l, e);
    if ((c >> (h - 1 - l)) & 1) {
      res += (e - oe) - (s - os);
      s = zeros_[l] + os;
      e = zeros_[l] + oe;
    } else {
      s -= os;
      e -= oe;
    }
  }
  return res + (e - s);
}

uint64_t WaveletMatrix::access(uint64_t i) const { return map_.raw(access_code(i)); }

uint64_t WaveletMatrix::rank(uint64_t raw, uint64_t i) const {
  check_index(i);
  auto c = map_.code(raw);
  return c ? rank_code(*c, i) : 0;
}

uint64_t WaveletMatrix::select(uint64_t raw, uint64_t j) const {
  auto c = map_.code(raw);
  if (!c) throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range (count 0)");
  return select_code(*c, j);
}

uint64_t WaveletMatrix::rank_le(uint64_t raw, uint64_t i) const {
  check_index(i);
  const uint64_t k = map_.count_le(raw);
  return k == 0 ? 0 : rank_le_code(k - 1, i);
}

void WaveletMatrix::save(ByteWriter& out) const {
  out.put_u64(n_);
  out.put_u8(static_cast<uint8_t>(tau_));
  {
    ByteWriter s;
    s.put_word_array(map_.symbols());
    out.put_section(kTagAlphabet, s);
  }
  out.put_u8(static_cast<uint8_t>(levels_.size()));
  out.put_word_array(zeros_);
  for (const auto& l : levels_) {
    ByteWriter s;
    l.save(s);
    out.put_section(kTagLevel, s);
  }
}

WaveletMatrix WaveletMatrix::load(ByteReader& in) {
  WaveletMatrix wm;
  wm.n_ = in.u64();
  wm.tau_ = in.u8();
  {
    ByteReader s = in.section(kTagAlphabet);
    std::vector<uint64_t> sym = s.word_array();
    s.expect_end();
    for (size_t k = 1; k < sym.size(); ++k)
      if (sym[k - 1] >= sym[k]) throw CorruptArchive("alphabet not strictly increasing");
    if (sym.size() > wm.n_ || (wm.n_ > 0 && sym.empty())) throw CorruptArchive("alphabet size inconsistent with length");
    wm.map_ = AlphabetMap(std::move(sym));
  }
  const unsigned h = in.u8();
  const unsigned want = wm.map_.size() == 1 ? 0 : CodeShape::balanced(wm.map_.size()).height();
  if (h != want) throw CorruptArchive("matrix level count does not match alphabet");
  wm.zeros_ = in.word_array();
  if (wm.zeros_.size() != h) throw CorruptArchive("matrix zero counts missing");
  wm.levels_.resize(h);
  for (unsigned l = 0; l < h; ++l) {
    ByteReader s = in.section(kTagLevel);
    wm.levels_[l] = BinaryRS::load(s);
    s.expect_end();
    if (wm.levels_[l].size() != wm.n_) throw CorruptArchive("matrix level length mismatch");
    if (wm.levels_[l].count(false) != wm.zeros_[l]) throw CorruptArchive("matrix zero count mismatch");
  }
  return wm;
}

}  // namespace wsds
