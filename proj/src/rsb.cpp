#include "wsds/rsb.hpp"

#include <string>

namespace wsds {

void SampledSelect::save(ByteWriter& out) const {
  out.put_u8(static_cast<uint8_t>(geo_.kind));
  out.put_u64(geo_.lambda);
  out.put_u64(geo_.sigma);
  out.put_u64(geo_.g1);
  out.put_u64(geo_.range_direct_min);
  out.put_u64(total_);
  out.put_u64(ranges_.size());
  for (const auto& r : ranges_) {
    out.put_u64(r.start);
    out.put_u64(r.end);
    out.put_u64(r.payload);
    out.put_u32(r.width);
    out.put_u32(r.g2);
    out.put_u64(r.subs);
  }
  out.put_word_array(pool_);
}

SampledSelect SampledSelect::load(ByteReader& in) {
  SampledSelect s;
  const uint8_t kind = in.u8();
  if (kind > 1) throw CorruptArchive("bad select geometry kind");
  s.geo_.kind = static_cast<SelectGeometry::Kind>(kind);
  s.geo_.lambda = in.u64();
  s.geo_.sigma = in.u64();
  s.geo_.g1 = in.u64();
  s.geo_.range_direct_min = in.u64();
  s.total_ = in.u64();
  const uint64_t nr = in.u64();
  if (s.geo_.g1 == 0) throw CorruptArchive("zero select sampling rate");
  if (nr != (s.total_ + s.geo_.g1 - 1) / s.geo_.g1) throw CorruptArchive("select range count mismatch");
  if (nr > in.remaining() / 40) throw CorruptArchive("select range table truncated");
  s.ranges_.resize(nr);
  for (auto& r : s.ranges_) {
    r.start = in.u64();
    r.end = in.u64();
    r.payload = in.u64();
    r.width = in.u32();
    r.g2 = in.u32();
    r.subs = in.u64();
    if (r.width < 1 || r.width > 64 || r.end < r.start) throw CorruptArchive("bad select range");
  }
  s.pool_ = in.word_array();
  for (const auto& r : s.ranges_)
    if (r.payload > s.pool_.size()) throw CorruptArchive("select payload offset out of bounds");
  return s;
}

RankDirectory build_binary_rank(CostMeter& meter, const PackedBitVector& bits) {
  const auto words = bits.words();
  const size_t W = words.size();
  std::vector<uint64_t> counts(W);
  parallel_for(meter, W, [&](size_t w, CostMeter& m) {
    counts[w] = std::popcount(words[w]);
    m.charge(2);
  });
  auto scan = prefix_sum(meter, std::span<const uint64_t>(counts));
  const auto& cum = scan.prefixes;

  RankDirectory dir;
  const size_t nr = (W + kRankRangeWords - 1) / kRankRangeWords;
  dir.ranges.resize(nr);
  parallel_for(meter, nr, [&](size_t k, CostMeter& m) {
    dir.ranges[k] = cum[k * kRankRangeWords];
    m.charge(1);
  });
  dir.subs = pack_parallel(meter, W, kRankSubWidth,
                           [&](uint64_t w) { return cum[w] - cum[w / kRankRangeWords * kRankRangeWords]; });
  return dir;
}

SampledSelect build_binary_select(CostMeter& meter, const PackedBitVector& bits, bool value,
                                  const SizeParams& params, const WordTables& tables) {
  const BitSource src(bits, value, tables);
  const uint64_t n = bits.size();
  const size_t W = bits.words().size();
  std::vector<uint64_t> counts(W);
  parallel_for(meter, W, [&](size_t w, CostMeter& m) {
    const unsigned hi = static_cast<unsigned>(std::min<uint64_t>(64, n - uint64_t{w} * 64));
    counts[w] = std::popcount(src.word(w) & low_mask(hi));
    m.charge(2);
  });
  auto scan = prefix_sum(meter, std::span<const uint64_t>(counts));
  const uint64_t total = scan.total;
  const SelectGeometry geo = SelectGeometry::binary(params);
  const uint64_t g1 = geo.g1;
  std::vector<uint64_t> samples((total + g1 - 1) / g1);
  parallel_for(meter, W, [&](size_t w, CostMeter& m) {
    const uint64_t before = scan.prefixes[w];
    uint64_t ops = 1;
    // samples are occurrences k*g1 + 1
    for (uint64_t k = (before + g1 - 1) / g1; k * g1 < before + counts[w]; ++k) {
      samples[k] = uint64_t{w} * 64 + src.select(w, 0, k * g1 + 1 - before, &ops);
      ++ops;
    }
    m.charge(ops);
  });
  return SampledSelect::build(meter, src, geo, total, samples, n);
}

BinaryRS BinaryRS::build(CostMeter& meter, PackedBitVector bits, const SizeParams& params,
                         std::shared_ptr<const WordTables> tables) {
  BinaryRS rs;
  rs.bits_ = std::move(bits);
  rs.params_ = params;
  rs.tables_ = std::move(tables);
  CostMeter a, b, c;
  rs.rank_ = build_binary_rank(a, rs.bits_);
  rs.sel_[0] = build_binary_select(b, rs.bits_, false, params, *rs.tables_);
  rs.sel_[1] = build_binary_select(c, rs.bits_, true, params, *rs.tables_);
  meter.join(a.work + b.work + c.work, std::max({a.span, b.span, c.span}), 2);
  rs.ones_ = rs.sel_[1].total();
  return rs;
}

BinaryRS BinaryRS::build(CostMeter& meter, PackedBitVector bits) {
  const SizeParams p = SizeParams::for_length(bits.size());
  auto tables = TableRegistry::instance().word(p.kappa);
  charge_table(meter, tables->build_cost());
  return build(meter, std::move(bits), p, std::move(tables));
}

BinaryRS BinaryRS::build(PackedBitVector bits) {
  CostMeter m;
  return build(m, std::move(bits));
}

uint64_t BinaryRS::rank(bool v, uint64_t i) const {
  if (i >= size())
    throw IndexOutOfRange("rank: index " + std::to_string(i) + " out of range for length " + std::to_string(size()));
  const uint64_t r1 = rank1_unchecked(i);
  return v ? r1 : i + 1 - r1;
}

uint64_t BinaryRS::select(bool v, uint64_t j) const {
  if (j == 0 || j > count(v))
    throw OccurrenceOutOfRange("select: occurrence " + std::to_string(j) + " of bit " + std::to_string(v) +
                               " out of range (count " + std::to_string(count(v)) + ")");
  return sel_[v ? 1 : 0].select(BitSource(bits_, v, *tables_), j);
}

void BinaryRS::save(ByteWriter& out) const {
  out.put_bitvector(bits_);
  out.put_u64(params_.L);
  out.put_u64(params_.lambda);
  out.put_u8(static_cast<uint8_t>(params_.kappa));
  out.put_word_array(rank_.ranges);
  out.put_packed(rank_.subs);
  sel_[0].save(out);
  sel_[1].save(out);
}

BinaryRS BinaryRS::load(ByteReader& in) {
  BinaryRS rs;
  rs.bits_ = in.bitvector();
  rs.params_.L = in.u64();
  rs.params_.lambda = in.u64();
  rs.params_.kappa = in.u8();
  if (rs.params_.kappa < 8 || rs.params_.kappa > 16) throw CorruptArchive("bad table key width");
  rs.rank_.ranges = in.word_array();
  rs.rank_.subs = in.packed();
  const uint64_t W = rs.bits_.words().size();
  if (rs.rank_.subs.width() != kRankSubWidth || rs.rank_.subs.size() != W ||
      rs.rank_.ranges.size() != (W + kRankRangeWords - 1) / kRankRangeWords)
    throw CorruptArchive("rank directory does not match bit vector");
  rs.sel_[0] = SampledSelect::load(in);
  rs.sel_[1] = SampledSelect::load(in);
  rs.ones_ = rs.sel_[1].total();
  if (rs.ones_ > rs.size() || rs.sel_[0].total() != rs.size() - rs.ones_)
    throw CorruptArchive("select totals do not match bit vector");
  if (rs.size() > 0 && rs.rank1_unchecked(rs.size() - 1) != rs.ones_)
    throw CorruptArchive("rank directory inconsistent with select totals");
  rs.tables_ = TableRegistry::instance().word(rs.params_.kappa);
  return rs;
}

uint64_t BinaryRS::overhead_bytes() const {
  return rank_.ranges.size() * 8 + rank_.subs.words().size() * 8 + sel_[0].bytes() + sel_[1].bytes();
}

}  // namespace wsds
