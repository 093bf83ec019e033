#include "wsds/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "wsds/oracle.hpp"

namespace wsds {

namespace {

oracle::Bits to_bits(const PackedBitVector& v) {
  oracle::Bits b(v.size());
  for (uint64_t i = 0; i < v.size(); ++i) b[i] = v[i];
  return b;
}

template <class... Args>
std::string msg(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

std::optional<std::string> check_nodes(const WaveletTree& t, std::span<const uint64_t> raw) {
  oracle::NodeBits want;
  if (t.shape().kind() == CodeShape::Kind::kBalanced) {
    want = oracle::tree(raw);
  } else {
    want = oracle::shaped(raw, t.shape().book().code, t.shape().book().len);
  }
  const auto& got = t.nodes();
  for (const auto& [id, bits] : want) {
    const WaveletTree::Node* nd = t.node(id);
    if (!nd) return msg("node ", id, " missing");
    if (to_bits(nd->rs.bits()) != bits) return msg("node ", id, " bitmap differs from oracle");
  }
  if (got.size() != want.size()) return msg("node count ", got.size(), ", oracle ", want.size());
  return std::nullopt;
}

std::optional<std::string> check_nodes(const MultiaryTree& t, std::span<const uint64_t> raw) {
  auto want = oracle::multiary(raw, t.degree());
  for (const auto& [id, digits] : want) {
    const MultiaryTree::Node* nd = t.node(id);
    if (!nd) return msg("node ", id, " missing");
    const PackedList& seq = nd->rs.seq();
    bool same = seq.size() == digits.size();
    for (uint64_t i = 0; same && i < digits.size(); ++i) same = seq[i] == digits[i];
    if (!same) return msg("node ", id, " digits differ from oracle");
  }
  if (t.nodes().size() != want.size()) return msg("node count ", t.nodes().size(), ", oracle ", want.size());
  return std::nullopt;
}

std::optional<std::string> check_nodes(const WaveletMatrix& m, std::span<const uint64_t> raw) {
  auto want = oracle::matrix(raw);
  if (m.levels() != want.levels.size()) return msg("level count ", m.levels(), ", oracle ", want.levels.size());
  for (unsigned l = 0; l < m.levels(); ++l) {
    if (to_bits(m.level(l).bits()) != want.levels[l]) return msg("level ", l, " bitmap differs from oracle");
    if (m.zeros(l) != want.zeros[l]) return msg("level ", l, " zero count differs from oracle");
  }
  return std::nullopt;
}

template <class F>
std::optional<std::string> expect_eq(uint64_t got, uint64_t want, F&& describe) {
  if (got == want) return std::nullopt;
  return msg(describe(), " = ", got, ", oracle ", want);
}

}  // namespace

std::optional<std::string> check_structure(const Structure& s, std::span<const uint64_t> raw, uint64_t samples,
                                           uint64_t seed) {
  const uint64_t n = raw.size();
  if (s.size() != n) return msg("size ", s.size(), ", oracle ", n);
  if (auto e = std::visit([&](const auto& x) { return check_nodes(x, raw); }, s.get())) return e;

  const oracle::Dense d = oracle::dense(raw);
  if (s.sigma() != d.symbols.size()) return msg("sigma ", s.sigma(), ", oracle ", d.symbols.size());

  std::mt19937_64 rng(seed);
  const bool exhaustive = n <= 4096;
  // Symbols probed: every distinct one plus one absent value.
  uint64_t absent = 0;
  while (std::binary_search(d.symbols.begin(), d.symbols.end(), absent)) ++absent;

  if (exhaustive) {
    // One sweep with running per-symbol counts.
    const uint64_t k = d.symbols.size();
    std::vector<uint64_t> cnt(k, 0);
    const uint64_t below_absent =
        std::lower_bound(d.symbols.begin(), d.symbols.end(), absent) - d.symbols.begin();
    for (uint64_t i = 0; i < n; ++i) {
      if (s.access(i) != raw[i]) return msg("access(", i, ") = ", s.access(i), ", oracle ", raw[i]);
      ++cnt[d.codes[i]];
      uint64_t le = 0;
      for (uint64_t c = 0; c < k; ++c) {
        le += cnt[c];
        const uint64_t sym = d.symbols[c];
        if (s.rank(sym, i) != cnt[c]) return msg("rank(", sym, ", ", i, ") = ", s.rank(sym, i), ", oracle ", cnt[c]);
        if (s.rank_le(sym, i) != le)
          return msg("rank_le(", sym, ", ", i, ") = ", s.rank_le(sym, i), ", oracle ", le);
        if (c + 1 == below_absent && s.rank_le(absent, i) != le)
          return msg("rank_le(", absent, ", ", i, ") = ", s.rank_le(absent, i), ", oracle ", le);
      }
      if (below_absent == 0 && s.rank_le(absent, i) != 0)
        return msg("rank_le(", absent, ", ", i, ") = ", s.rank_le(absent, i), ", oracle 0");
      if (s.rank(absent, i) != 0) return msg("rank(", absent, ", ", i, ") = ", s.rank(absent, i), ", oracle 0");
    }
  } else {
    std::vector<uint64_t> syms = d.symbols;
    syms.push_back(absent);
    for (uint64_t k = 0; k < samples; ++k) {
      const uint64_t i = rng() % n;
      const uint64_t c = syms[rng() % syms.size()];
      if (auto e = expect_eq(s.access(i), oracle::access(raw, i), [&] { return msg("access(", i, ")"); })) return e;
      if (auto e = expect_eq(s.rank(c, i), oracle::rank(raw, c, i), [&] { return msg("rank(", c, ", ", i, ")"); }))
        return e;
      if (auto e = expect_eq(s.rank_le(c, i), oracle::rank_le(raw, c, i),
                             [&] { return msg("rank_le(", c, ", ", i, ")"); }))
        return e;
    }
  }
  std::vector<std::vector<uint64_t>> pos(d.symbols.size());
  for (uint64_t i = 0; i < n; ++i) pos[d.codes[i]].push_back(i);
  for (uint64_t c = 0; c < d.symbols.size(); ++c) {
    const uint64_t sym = d.symbols[c];
    const uint64_t cnt = pos[c].size();
    const uint64_t js = exhaustive ? cnt : std::min<uint64_t>(cnt, 64);
    for (uint64_t k = 1; k <= js; ++k) {
      const uint64_t j = exhaustive ? k : 1 + rng() % cnt;
      if (auto e = expect_eq(s.select(sym, j), pos[c][j - 1], [&] { return msg("select(", sym, ", ", j, ")"); }))
        return e;
    }
    try {
      s.select(sym, cnt + 1);
      return msg("select(", sym, ", ", cnt + 1, ") did not report out of range");
    } catch (const OccurrenceOutOfRange&) {
    }
  }
  try {
    s.select(absent, 1);
    return msg("select(", absent, ", 1) did not report out of range");
  } catch (const OccurrenceOutOfRange&) {
  }
  try {
    s.access(n);
    return msg("access(", n, ") did not report out of range");
  } catch (const IndexOutOfRange&) {
  }
  return std::nullopt;
}

Structure inject_bitmap_fault(const Structure& s) {
  const auto* t = std::get_if<WaveletTree>(&s.get());
  if (!t) throw ContractViolation("fault injection needs a tree variant");
  NodeBitmaps bitmaps;
  bool flipped = false;
  for (const auto& nd : t->nodes()) {
    PackedBitVector bits = nd.rs.bits();
    if (!flipped && bits.size() > 0) {
      bits.set(0, !bits[0]);
      flipped = true;
    }
    bitmaps.emplace_back(nd.id, std::move(bits));
  }
  if (!flipped) throw ContractViolation("no bitmap bit to flip");
  CostMeter m;
  return Structure(WaveletTree(m, t->shape(), t->alphabet(), t->size(), t->tau(), std::move(bitmaps)));
}

std::vector<uint64_t> random_sequence(uint64_t n, uint64_t sigma, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<uint64_t> s(n);
  const uint64_t hi = std::max<uint64_t>(sigma, 1);
  // Half the instances draw from a skewed distribution.
  const bool skew = rng() & 1;
  for (auto& x : s) {
    if (skew) {
      uint64_t c = 0;
      while (c + 1 < hi && (rng() & 1)) ++c;
      x = c;
    } else {
      x = rng() % hi;
    }
  }
  return s;
}

std::optional<std::string> verify_instance(const VerifyConfig& cfg, uint64_t seed) {
  const std::vector<uint64_t> raw = random_sequence(cfg.n, cfg.sigma, seed);
  StructureSpec spec;
  spec.variant = cfg.variant;
  spec.params.tau = cfg.tau;
  spec.params.parts = cfg.parts;
  spec.degree = cfg.degree;

  std::vector<BuildAlgo> algos = cfg.algos;
  if (cfg.variant == Variant::kMultiary || cfg.variant == Variant::kMatrix) algos = {BuildAlgo::kSorted};

  std::optional<Structure> first;
  std::vector<uint8_t> first_bytes;
  for (BuildAlgo a : algos) {
    spec.algo = a;
    CostMeter meter;
    Structure s = build_structure(meter, raw, spec);
    std::vector<uint8_t> bytes = serialize(s);
    if (!first) {
      first = std::move(s);
      first_bytes = std::move(bytes);
    } else if (bytes != first_bytes) {
      return msg("archive from ", algo_name(a), " differs from ", algo_name(algos.front()));
    }
  }
  if (deserialize(first_bytes) != *first) return std::string("archive round trip changed the structure");
  if (serialize(deserialize(first_bytes)) != first_bytes) return std::string("archive round trip not byte-stable");
  if (cfg.inject_fault) first = inject_bitmap_fault(*first);
  return check_structure(*first, raw, 2000, seed);
}

}  // namespace wsds
