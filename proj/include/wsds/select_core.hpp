#pragma once

// Three-tier sampled select shared by the binary and generalized structures.
//
// Every g1'th occurrence is sampled; the samples cut the sequence into ranges.
// A range at least `range_direct_min` long stores every occurrence relative to
// its start. Shorter ranges sample every g2(len)'th occurrence into sub-ranges;
// a sub-range that passes `sub_direct` stores its occurrences relative to the
// sub-range start, the rest are answered by a bounded scan over units.
//
// A Source describes the sequence as fixed-length units (a word of bits, or a
// group of symbols) and answers per-unit count/select/enumerate for one
// particular value:
//   uint64_t unit_len() const;  uint64_t length() const;
//   uint64_t count(uint64_t u, unsigned lo, unsigned hi, uint64_t* ops) const;
//   unsigned select(uint64_t u, unsigned lo, uint64_t j, uint64_t* ops) const;
//   void for_each(uint64_t u, unsigned lo, unsigned hi, F f, uint64_t* ops) const;
// Offsets lo/hi are within the unit; hi is clamped to the sequence end by the caller.

#include <cstdint>
#include <span>
#include <vector>

#include "wsds/bits.hpp"
#include "wsds/io.hpp"
#include "wsds/par.hpp"

namespace wsds {

struct SelectGeometry {
  enum class Kind : uint8_t { kBinary = 0, kGeneral = 1 };

  Kind kind = Kind::kBinary;
  uint64_t lambda = 1;
  uint64_t sigma = 2;
  uint64_t g1 = 1;
  uint64_t range_direct_min = 1;

  /// Binary: g1 = L*lambda, direct ranges when len >= (L*lambda)^2.
  static SelectGeometry binary(const SizeParams& p) {
    SelectGeometry g;
    g.kind = Kind::kBinary;
    g.lambda = p.lambda;
    g.g1 = p.L * p.lambda;
    g.range_direct_min = g.g1 * g.g1;
    return g;
  }

  /// Generalized, per character: g1 = sigma*L^2, direct ranges when len >= sigma^2*L^4.
  static SelectGeometry general(const SizeParams& p, uint64_t sigma) {
    SelectGeometry g;
    g.kind = Kind::kGeneral;
    g.lambda = p.lambda;
    g.sigma = sigma;
    g.g1 = sigma * p.L * p.L;
    g.range_direct_min = g.g1 * g.g1;
    return g;
  }

  uint64_t g2(uint64_t range_len) const {
    if (kind == Kind::kBinary) return std::max<uint64_t>(1, ceil_log2(range_len)) * lambda;
    return sigma * lambda * lambda;
  }

  bool sub_direct(uint64_t sub_len, uint64_t range_len) const {
    if (kind == Kind::kBinary) {
      const uint64_t a = std::max<uint64_t>(1, ceil_log2(sub_len));
      const uint64_t b = std::max<uint64_t>(1, ceil_log2(range_len));
      return sub_len >= a * b * lambda * lambda;
    }
    const uint64_t s = sigma * lambda;
    return sub_len >= s * s * sigma * lambda * lambda;
  }

  bool operator==(const SelectGeometry&) const = default;
};

class SampledSelect {
 public:
  struct Range {
    uint64_t start = 0;
    uint64_t end = 0;
    uint64_t payload = 0;  // word offset into the pool
    uint32_t width = 0;    // bits per stored offset
    uint32_t g2 = 0;       // 0 for direct ranges
    uint64_t subs = 0;

    bool direct() const { return g2 == 0; }
    bool operator==(const Range&) const = default;
  };

  static constexpr uint64_t kDirectFlag = uint64_t{1} << 63;

  SampledSelect() = default;

  uint64_t total() const { return total_; }
  const SelectGeometry& geometry() const { return geo_; }
  std::span<const Range> ranges() const { return ranges_; }
  std::span<const uint64_t> pool() const { return pool_; }
  uint64_t direct_ranges() const {
    uint64_t c = 0;
    for (const auto& r : ranges_) c += r.direct();
    return c;
  }

  /// Builds from the positions of occurrences 1, g1+1, 2*g1+1, ... and the
  /// position one past the last range's end.
  template <class Source>
  static SampledSelect build(CostMeter& meter, const Source& src, const SelectGeometry& geo, uint64_t total,
                             std::span<const uint64_t> samples, uint64_t end_pos);

  /// 0-based position of the j'th occurrence, 1 <= j <= total().
  template <class Source>
  uint64_t select(const Source& src, uint64_t j) const;

  void save(ByteWriter& out) const;
  static SampledSelect load(ByteReader& in);

  uint64_t bytes() const { return pool_.size() * 8 + ranges_.size() * sizeof(Range); }

  bool operator==(const SampledSelect&) const = default;

 private:
  static uint64_t read_field(std::span<const uint64_t> pool, uint64_t word, uint64_t idx, unsigned width) {
    const uint64_t pos = word * 64 + idx * width;
    const uint64_t w = pos >> 6;
    const unsigned off = pos & 63;
    uint64_t v = pool[w] >> off;
    if (off + width > 64) v |= pool[w + 1] << (64 - off);
    return v & low_mask(width);
  }

  template <class Source, class F>
  static void for_each_in(const Source& src, uint64_t lo, uint64_t hi, F&& f, uint64_t* ops) {
    const uint64_t U = src.unit_len();
    for (uint64_t u = lo / U; u * U < hi; ++u) {
      const unsigned a = static_cast<unsigned>(lo > u * U ? lo - u * U : 0);
      const unsigned b = static_cast<unsigned>(std::min<uint64_t>(U, hi - u * U));
      src.for_each(u, a, b, [&](unsigned off) { f(u * U + off); }, ops);
    }
  }

  /// Position of the j'th occurrence at or after `from`.
  template <class Source>
  static uint64_t scan_select(const Source& src, uint64_t from, uint64_t j, uint64_t* ops) {
    const uint64_t U = src.unit_len();
    const uint64_t n = src.length();
    uint64_t u = from / U;
    unsigned lo = static_cast<unsigned>(from % U);
    for (;;) {
      const unsigned hi = static_cast<unsigned>(std::min<uint64_t>(U, n - u * U));
      const uint64_t c = src.count(u, lo, hi, ops);
      if (j <= c) return u * U + src.select(u, lo, j, ops);
      j -= c;
      ++u;
      lo = 0;
    }
  }

  template <class Source>
  static std::vector<uint64_t> range_payload(const Source& src, const SelectGeometry& geo, Range& r, uint64_t count,
                                             uint64_t* ops);

  SelectGeometry geo_;
  uint64_t total_ = 0;
  std::vector<Range> ranges_;
  std::vector<uint64_t> pool_;
};

template <class Source>
std::vector<uint64_t> SampledSelect::range_payload(const Source& src, const SelectGeometry& geo, Range& r,
                                                   uint64_t count, uint64_t* ops) {
  const uint64_t len = r.end - r.start;
  r.width = width_for_below(len);
  if (len >= geo.range_direct_min) {
    r.g2 = 0;
    r.subs = 0;
    BitBuffer buf;
    for_each_in(src, r.start, r.end, [&](uint64_t p) { *ops += buf.append_bits(p - r.start, r.width) + 1; }, ops);
    return {buf.words().begin(), buf.words().end()};
  }

  const uint64_t g2 = geo.g2(len);
  r.g2 = static_cast<uint32_t>(g2);
  r.subs = (count + g2 - 1) / g2;

  // Sub-range starts: occurrences 1, g2+1, 2*g2+1, ... of this range.
  std::vector<uint64_t> starts;
  starts.reserve(r.subs);
  {
    const uint64_t U = src.unit_len();
    uint64_t seen = 0;
    uint64_t target = 1;
    for (uint64_t u = r.start / U; u * U < r.end && starts.size() < r.subs; ++u) {
      const unsigned a = static_cast<unsigned>(r.start > u * U ? r.start - u * U : 0);
      const unsigned b = static_cast<unsigned>(std::min<uint64_t>(U, r.end - u * U));
      const uint64_t c = src.count(u, a, b, ops);
      while (target <= seen + c && starts.size() < r.subs) {
        starts.push_back(u * U + src.select(u, a, target - seen, ops));
        target += g2;
      }
      seen += c;
    }
  }

  BitBuffer head;
  for (uint64_t s : starts) *ops += head.append_bits(s - r.start, r.width) + 1;
  std::vector<uint64_t> out(head.words().begin(), head.words().end());
  const uint64_t desc_base = out.size();
  out.resize(out.size() + r.subs, 0);
  *ops += r.subs;
  for (uint64_t s = 0; s < r.subs; ++s) {
    const uint64_t lo = starts[s];
    const uint64_t hi = s + 1 < r.subs ? starts[s + 1] : r.end;
    if (!geo.sub_direct(hi - lo, len)) continue;
    const unsigned w = width_for_below(hi - lo);
    BitBuffer buf;
    for_each_in(src, lo, hi, [&](uint64_t p) { *ops += buf.append_bits(p - lo, w) + 1; }, ops);
    out[desc_base + s] = kDirectFlag | out.size();
    out.insert(out.end(), buf.words().begin(), buf.words().end());
  }
  return out;
}

template <class Source>
SampledSelect SampledSelect::build(CostMeter& meter, const Source& src, const SelectGeometry& geo, uint64_t total,
                                   std::span<const uint64_t> samples, uint64_t end_pos) {
  SampledSelect s;
  s.geo_ = geo;
  s.total_ = total;
  const size_t nr = samples.size();
  s.ranges_.resize(nr);
  std::vector<std::vector<uint64_t>> payloads(nr);
  std::vector<uint64_t> sizes(nr);
  parallel_for(meter, nr, [&](size_t k, CostMeter& m) {
    Range& r = s.ranges_[k];
    r.start = samples[k];
    r.end = k + 1 < nr ? samples[k + 1] : end_pos;
    const uint64_t count = std::min<uint64_t>(geo.g1, total - k * geo.g1);
    uint64_t ops = 2;
    payloads[k] = range_payload(src, geo, r, count, &ops);
    sizes[k] = payloads[k].size();
    m.charge(ops);
  });
  auto offsets = prefix_sum(meter, std::span<const uint64_t>(sizes));
  s.pool_.assign(offsets.total, 0);
  parallel_for(meter, nr, [&](size_t k, CostMeter& m) {
    s.ranges_[k].payload = offsets.prefixes[k];
    std::copy(payloads[k].begin(), payloads[k].end(), s.pool_.begin() + offsets.prefixes[k]);
    m.charge(1 + payloads[k].size());
  });
  return s;
}

template <class Source>
uint64_t SampledSelect::select(const Source& src, uint64_t j) const {
  const uint64_t k = (j - 1) / geo_.g1;
  const uint64_t jj = (j - 1) % geo_.g1;
  const Range& r = ranges_[k];
  if (r.direct()) return r.start + read_field(pool_, r.payload, jj, r.width);
  const uint64_t s = jj / r.g2;
  const uint64_t jr = jj % r.g2;
  const uint64_t sub_start = r.start + read_field(pool_, r.payload, s, r.width);
  const uint64_t desc = pool_[r.payload + words_for_bits(r.subs * r.width) + s];
  if (desc & kDirectFlag) {
    const uint64_t sub_end = s + 1 < r.subs ? r.start + read_field(pool_, r.payload, s + 1, r.width) : r.end;
    return sub_start + read_field(pool_, r.payload + (desc & ~kDirectFlag), jr, width_for_below(sub_end - sub_start));
  }
  uint64_t ops = 0;
  return scan_select(src, sub_start, jr + 1, &ops);
}

}  // namespace wsds
