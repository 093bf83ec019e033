#include "wsds/rsg.hpp"

#include <atomic>
#include <string>

namespace wsds {

uint64_t general_sub_len(unsigned b) { return std::max(1u, 64 / (3 * b)); }

uint64_t general_range_len(unsigned sigma, unsigned b) {
  const uint64_t u = general_sub_len(b);
  return u * ((uint64_t{sigma} * 4096 + u - 1) / u);
}

namespace {

using Counts = GeneralRS::Counts;
using Windows = std::array<OccurrenceWindow, kMaxGeneralSigma>;

struct ChunkInfo {
  Counts counts{};
  Windows windows{};
};

void check_sigma(unsigned sigma, const PackedList& seq) {
  if (sigma < 1 || sigma > kMaxGeneralSigma)
    throw ContractViolation("generalized rank/select: alphabet size " + std::to_string(sigma) +
                            " outside [1, 16]");
  if (seq.width() != symbol_width(sigma))
    throw ContractViolation("generalized rank/select: sequence width " + std::to_string(seq.width()) +
                            " does not match alphabet size " + std::to_string(sigma));
}

}  // namespace

GeneralRankParts build_general_rank(CostMeter& meter, const PackedList& seq, unsigned sigma) {
  const unsigned b = seq.width();
  const uint64_t n = seq.size();
  const uint64_t lsbs = swar::field_lsbs(b);
  GeneralRankParts parts;
  parts.u = general_sub_len(b);
  parts.R = general_range_len(sigma, b);
  const uint64_t u = parts.u;
  const uint64_t per_range = parts.R / u;
  const uint64_t S = (n + u - 1) / u;

  std::vector<Counts> local(S);
  std::atomic<bool> bad{false};
  parallel_for(meter, S, [&](size_t s, CostMeter& m) {
    const uint64_t len = std::min<uint64_t>(u, n - s * u);
    const uint64_t x = seq.bits().extract(s * u * b, static_cast<unsigned>(len * b));
    const uint64_t valid = low_mask(static_cast<unsigned>(len * b));
    Counts& h = local[s];
    for (unsigned c = 0; c < sigma; ++c) h[c] = std::popcount(swar::le_marks(x, b, c, lsbs) & valid);
    if (h[sigma - 1] != len) bad = true;
    m.charge(1 + uint64_t{sigma} * (b + 1));
  });
  if (bad) throw ContractViolation("generalized rank: symbol outside alphabet of size " + std::to_string(sigma));

  auto add = [sigma](const Counts& a, const Counts& c) {
    Counts r{};
    for (unsigned k = 0; k < sigma; ++k) r[k] = a[k] + c[k];
    return r;
  };
  auto scan = prefix_sum(meter, std::span<const Counts>(local), add, Counts{}, sigma);
  const auto& cum = scan.prefixes;
  parts.totals = scan.total;

  const uint64_t nr = (n + parts.R - 1) / parts.R;
  parts.ranges.resize(nr * sigma);
  parallel_for(meter, nr, [&](size_t k, CostMeter& m) {
    for (unsigned c = 0; c < sigma; ++c) parts.ranges[k * sigma + c] = cum[k * per_range][c];
    m.charge(sigma);
  });
  parts.subs = pack_parallel(meter, S * sigma, width_for_below(parts.R + 1), [&](uint64_t f) {
    const uint64_t s = f / sigma;
    const unsigned c = static_cast<unsigned>(f % sigma);
    return cum[s][c] - cum[s / per_range * per_range][c];
  });
  return parts;
}

std::vector<SampledSelect> build_general_select(CostMeter& meter, const PackedList& seq, unsigned sigma,
                                                const SizeParams& params, const WordTables& words,
                                                const SymbolTables& symbols) {
  const unsigned b = seq.width();
  const uint64_t n = seq.size();
  const uint64_t m = symbols.group_symbols();
  const uint64_t G = (n + m - 1) / m;
  const uint64_t per_chunk = params.L;
  const uint64_t C = (G + per_chunk - 1) / per_chunk;

  auto group_key = [&](uint64_t g) {
    const uint64_t len = std::min<uint64_t>(m, n - g * m);
    return seq.bits().extract(g * m * b, static_cast<unsigned>(len * b));
  };
  // Padding past n in the last group reads as symbol 0.
  auto group_count = [&](uint64_t g, uint64_t key, unsigned c) -> uint64_t {
    uint64_t k = symbols.count(key, c);
    if (c == 0 && g + 1 == G) k -= (G * m - n);
    return k;
  };

  std::vector<ChunkInfo> chunks(C);
  parallel_for(meter, C, [&](size_t ch, CostMeter& mt) {
    ChunkInfo& info = chunks[ch];
    const uint64_t g_end = std::min<uint64_t>(G, (ch + 1) * per_chunk);
    for (uint64_t g = ch * per_chunk; g < g_end; ++g) {
      const uint64_t key = group_key(g);
      for (unsigned c = 0; c < sigma; ++c) {
        const uint64_t k = group_count(g, key, c);
        if (k == 0) continue;
        info.counts[c] += k;
        OccurrenceWindow w{g * m + symbols.select(key, c, 1), g * m + symbols.select(key, c, static_cast<unsigned>(k))};
        info.windows[c] = info.windows[c] + w;
      }
      mt.charge(1 + 2 * uint64_t{sigma});
    }
  });

  auto combine = [sigma](const ChunkInfo& a, const ChunkInfo& c) {
    ChunkInfo r;
    for (unsigned k = 0; k < sigma; ++k) {
      r.counts[k] = a.counts[k] + c.counts[k];
      r.windows[k] = a.windows[k] + c.windows[k];
    }
    return r;
  };
  auto scan = prefix_sum(meter, std::span<const ChunkInfo>(chunks), combine, ChunkInfo{}, 2 * uint64_t{sigma});

  const SelectGeometry geo = SelectGeometry::general(params, sigma);
  const uint64_t g1 = geo.g1;
  std::vector<std::vector<uint64_t>> samples(sigma);
  for (unsigned c = 0; c < sigma; ++c) samples[c].resize((scan.total.counts[c] + g1 - 1) / g1);

  parallel_for(meter, C, [&](size_t ch, CostMeter& mt) {
    Counts run = scan.prefixes[ch].counts;
    const uint64_t g_end = std::min<uint64_t>(G, (ch + 1) * per_chunk);
    uint64_t ops = 0;
    for (uint64_t g = ch * per_chunk; g < g_end; ++g) {
      const uint64_t key = group_key(g);
      ops += 1 + sigma;
      for (unsigned c = 0; c < sigma; ++c) {
        const uint64_t k = group_count(g, key, c);
        for (uint64_t s = (run[c] + g1 - 1) / g1; s * g1 < run[c] + k; ++s) {
          samples[c][s] = g * m + symbols.select(key, c, static_cast<unsigned>(s * g1 + 1 - run[c]));
          ++ops;
        }
        run[c] += k;
      }
    }
    mt.charge(ops);
  });

  std::vector<SampledSelect> sel(sigma);
  parallel_for(meter, sigma, [&](size_t c, CostMeter& mt) {
    const uint64_t total = scan.total.counts[c];
    const uint64_t end = total ? scan.total.windows[c].last + 1 : 0;
    sel[c] = SampledSelect::build(mt, SymbolSource(seq, static_cast<unsigned>(c), words), geo, total,
                                  samples[c], end);
  });
  return sel;
}

GeneralRS GeneralRS::build(CostMeter& meter, PackedList seq, unsigned sigma, const SizeParams& params,
                           std::shared_ptr<const WordTables> words, std::shared_ptr<const SymbolTables> symbols) {
  check_sigma(sigma, seq);
  GeneralRS rs;
  rs.seq_ = std::move(seq);
  rs.sigma_ = sigma;
  rs.params_ = params;
  rs.words_ = std::move(words);
  GeneralRankParts parts;
  par_do(
      meter, [&](CostMeter& m) { parts = build_general_rank(m, rs.seq_, sigma); },
      [&](CostMeter& m) { rs.sel_ = build_general_select(m, rs.seq_, sigma, params, *rs.words_, *symbols); });
  rs.R_ = parts.R;
  rs.u_ = parts.u;
  rs.ranges_ = std::move(parts.ranges);
  rs.subs_ = std::move(parts.subs);
  return rs;
}

GeneralRS GeneralRS::build(CostMeter& meter, PackedList seq, unsigned sigma) {
  check_sigma(sigma, seq);
  const SizeParams p = SizeParams::for_length(seq.size());
  auto& reg = TableRegistry::instance();
  auto words = reg.word(p.kappa);
  auto symbols = reg.symbol(p.kappa, seq.width());
  charge_table(meter, words->build_cost());
  charge_table(meter, symbols->build_cost());
  return build(meter, std::move(seq), sigma, p, std::move(words), std::move(symbols));
}

GeneralRS GeneralRS::build(PackedList seq, unsigned sigma) {
  CostMeter m;
  return build(m, std::move(seq), sigma);
}

uint64_t GeneralRS::rank_le_unchecked(unsigned c, uint64_t i) const {
  const unsigned b = seq_.width();
  const uint64_t s = i / u_;
  const uint64_t len = i - s * u_ + 1;
  const uint64_t x = seq_.bits().extract(s * u_ * b, static_cast<unsigned>(len * b));
  const uint64_t inside =
      std::popcount(swar::le_marks(x, b, c, swar::field_lsbs(b)) & low_mask(static_cast<unsigned>(len * b)));
  return ranges_[i / R_ * sigma_ + c] + subs_[s * sigma_ + c] + inside;
}

uint64_t GeneralRS::rank_le(unsigned c, uint64_t i) const {
  if (i >= size())
    throw IndexOutOfRange("rank_le: index " + std::to_string(i) + " out of range for length " +
                          std::to_string(size()));
  if (c >= sigma_) throw ContractViolation("rank_le: symbol " + std::to_string(c) + " outside alphabet");
  return rank_le_unchecked(c, i);
}

uint64_t GeneralRS::rank(unsigned c, uint64_t i) const {
  const uint64_t le = rank_le(c, i);
  return c == 0 ? le : le - rank_le_unchecked(c - 1, i);
}

uint64_t GeneralRS::count(unsigned c) const {
  if (c >= sigma_) throw ContractViolation("count: symbol " + std::to_string(c) + " outside alphabet");
  return sel_[c].total();
}

uint64_t GeneralRS::select(unsigned c, uint64_t j) const {
  const uint64_t total = count(c);
  if (j == 0 || j > total)
    throw OccurrenceOutOfRange("select: occurrence " + std::to_string(j) + " of symbol " + std::to_string(c) +
                               " out of range (count " + std::to_string(total) + ")");
  return sel_[c].select(SymbolSource(seq_, c, *words_), j);
}

void GeneralRS::save(ByteWriter& out) const {
  out.put_packed(seq_);
  out.put_u32(sigma_);
  out.put_u64(params_.L);
  out.put_u64(params_.lambda);
  out.put_u8(static_cast<uint8_t>(params_.kappa));
  out.put_u64(R_);
  out.put_u64(u_);
  out.put_word_array(ranges_);
  out.put_packed(subs_);
  for (const auto& s : sel_) s.save(out);
}

GeneralRS GeneralRS::load(ByteReader& in) {
  GeneralRS rs;
  rs.seq_ = in.packed();
  rs.sigma_ = in.u32();
  if (rs.sigma_ < 1 || rs.sigma_ > kMaxGeneralSigma || rs.seq_.width() != symbol_width(rs.sigma_))
    throw CorruptArchive("bad generalized rank/select alphabet");
  rs.params_.L = in.u64();
  rs.params_.lambda = in.u64();
  rs.params_.kappa = in.u8();
  if (rs.params_.kappa < 8 || rs.params_.kappa > 16) throw CorruptArchive("bad table key width");
  rs.R_ = in.u64();
  rs.u_ = in.u64();
  const unsigned b = rs.seq_.width();
  if (rs.u_ != general_sub_len(b) || rs.R_ != general_range_len(rs.sigma_, b))
    throw CorruptArchive("bad generalized rank sampling");
  rs.ranges_ = in.word_array();
  rs.subs_ = in.packed();
  const uint64_t n = rs.size();
  if (rs.ranges_.size() != (n + rs.R_ - 1) / rs.R_ * rs.sigma_ ||
      rs.subs_.size() != (n + rs.u_ - 1) / rs.u_ * rs.sigma_)
    throw CorruptArchive("generalized rank directory does not match sequence");
  rs.sel_.resize(rs.sigma_);
  uint64_t total = 0;
  for (auto& s : rs.sel_) {
    s = SampledSelect::load(in);
    total += s.total();
  }
  if (total != n) throw CorruptArchive("select totals do not match sequence");
  rs.words_ = TableRegistry::instance().word(rs.params_.kappa);
  return rs;
}

uint64_t GeneralRS::overhead_bytes() const {
  uint64_t b = ranges_.size() * 8 + subs_.words().size() * 8;
  for (const auto& s : sel_) b += s.bytes();
  return b;
}

}  // namespace wsds
