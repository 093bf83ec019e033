// Acceptance harness: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wsds/archive.hpp"
#include "wsds/oracle.hpp"
#include "wsds/rsb.hpp"
#include "wsds/rsg.hpp"
#include "wsds/var.hpp"
#include "wsds/wt.hpp"

using namespace wsds;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

template <class... Args>
std::string str(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

std::vector<uint64_t> uniform(uint64_t n, uint64_t sigma, std::mt19937_64& rng) {
  std::vector<uint64_t> s(n);
  for (auto& x : s) x = rng() % sigma;
  return s;
}

// Random symbols: uniform, geometric-skewed, or drawn from a sparse raw range.
std::vector<uint64_t> mixed(uint64_t n, uint64_t sigma, std::mt19937_64& rng) {
  std::vector<uint64_t> s(n);
  switch (rng() % 3) {
    case 0:
      for (auto& x : s) x = rng() % sigma;
      break;
    case 1:
      for (auto& x : s) {
        uint64_t c = 0;
        while (c + 1 < sigma && (rng() & 1)) ++c;
        x = c;
      }
      break;
    default: {
      std::vector<uint64_t> alpha(sigma);
      for (auto& a : alpha) a = rng() % 1000000;
      for (auto& x : s) x = alpha[rng() % sigma];
    }
  }
  return s;
}

oracle::Bits bits_of(const PackedBitVector& v) {
  oracle::Bits b(v.size());
  for (uint64_t i = 0; i < v.size(); ++i) b[i] = v[i];
  return b;
}

// Node contents against the oracle; empty string when equal.
std::string compare_nodes(const Structure& st, std::span<const uint64_t> s) {
  if (const auto* t = std::get_if<WaveletTree>(&st.get())) {
    const oracle::NodeBits want = t->shape().kind() == CodeShape::Kind::kBalanced
                                      ? oracle::tree(s)
                                      : oracle::shaped(s, t->shape().book().code, t->shape().book().len);
    if (want.size() != t->nodes().size()) return str("node count ", t->nodes().size(), " vs ", want.size());
    for (size_t k = 0; k < want.size(); ++k) {
      if (t->nodes()[k].id != want[k].first) return str("node id ", t->nodes()[k].id, " vs ", want[k].first);
      if (bits_of(t->nodes()[k].rs.bits()) != want[k].second) return str("node ", want[k].first, " bitmap");
    }
  } else if (const auto* m = std::get_if<MultiaryTree>(&st.get())) {
    const auto want = oracle::multiary(s, m->degree());
    if (want.size() != m->nodes().size()) return str("node count ", m->nodes().size(), " vs ", want.size());
    for (size_t k = 0; k < want.size(); ++k) {
      if (m->nodes()[k].id != want[k].first) return str("node id ", m->nodes()[k].id, " vs ", want[k].first);
      if (m->nodes()[k].rs.seq().unpack() != want[k].second) return str("node ", want[k].first, " digits");
    }
  } else {
    const auto& wm = std::get<WaveletMatrix>(st.get());
    const auto want = oracle::matrix(s);
    if (want.levels.size() != wm.levels()) return str("level count ", wm.levels(), " vs ", want.levels.size());
    for (unsigned l = 0; l < wm.levels(); ++l) {
      if (bits_of(wm.level(l).bits()) != want.levels[l]) return str("level ", l, " bitmap");
      if (wm.zeros(l) != want.zeros[l]) return str("level ", l, " zeros");
    }
  }
  return {};
}

// Every position, every present symbol plus one absent one. Running counts per
// symbol serve as the scan oracle; a sample of positions also goes through the
// oracle module directly.
std::string exhaustive_queries(const Structure& st, std::span<const uint64_t> s, std::mt19937_64& rng) {
  const oracle::Dense d = oracle::dense(s);
  const uint64_t n = s.size(), k = d.symbols.size();
  uint64_t absent = 0;
  while (std::binary_search(d.symbols.begin(), d.symbols.end(), absent)) ++absent;
  const uint64_t below = std::lower_bound(d.symbols.begin(), d.symbols.end(), absent) - d.symbols.begin();
  std::vector<uint64_t> cnt(k, 0);
  std::vector<std::vector<uint64_t>> pos(k);
  for (uint64_t i = 0; i < n; ++i) {
    if (st.access(i) != s[i]) return str("access(", i, ")");
    ++cnt[d.codes[i]];
    pos[d.codes[i]].push_back(i);
    uint64_t le = 0, le_absent = 0;
    for (uint64_t c = 0; c < k; ++c) {
      le += cnt[c];
      if (c < below) le_absent = le;
      if (st.rank(d.symbols[c], i) != cnt[c]) return str("rank(", d.symbols[c], ",", i, ")");
      if (st.rank_le(d.symbols[c], i) != le) return str("rank_le(", d.symbols[c], ",", i, ")");
    }
    if (st.rank(absent, i) != 0) return str("rank(absent,", i, ")");
    if (st.rank_le(absent, i) != le_absent) return str("rank_le(absent,", i, ")");
  }
  for (uint64_t c = 0; c < k; ++c) {
    for (uint64_t j = 1; j <= pos[c].size(); ++j)
      if (st.select(d.symbols[c], j) != pos[c][j - 1]) return str("select(", d.symbols[c], ",", j, ")");
    try {
      st.select(d.symbols[c], pos[c].size() + 1);
      return str("select past count of ", d.symbols[c]);
    } catch (const OccurrenceOutOfRange&) {
    }
  }
  for (int probe = 0; probe < 8 && n > 0; ++probe) {
    const uint64_t i = rng() % n;
    const uint64_t c = d.symbols[rng() % k];
    if (st.rank(c, i) != oracle::rank(s, c, i) || st.rank_le(c, i) != oracle::rank_le(s, c, i) ||
        st.access(i) != oracle::access(s, i))
      return str("oracle probe at ", i);
    const uint64_t total = oracle::rank(s, c, n - 1);
    const uint64_t j = 1 + rng() % total;
    if (st.select(c, j) != oracle::select(s, c, j)) return str("oracle select probe ", c, ",", j);
  }
  try {
    st.access(n);
    return "access past end";
  } catch (const IndexOutOfRange&) {
  }
  return {};
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  const Variant variants[] = {Variant::kTree, Variant::kShaped, Variant::kMultiary, Variant::kMatrix};
  const unsigned degrees[] = {2, 4, 8, 16};
  uint64_t instances = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Variant v = variants[rep % 4];
    const uint64_t n = rng() % 4097;
    const uint64_t sigma = 1 + rng() % 64;
    const auto s = mixed(n, sigma, rng);
    StructureSpec spec;
    spec.variant = v;
    spec.algo = static_cast<BuildAlgo>(rng() % 4);
    spec.params.tau = rng() % 5;
    spec.params.parts = 1 + rng() % 8;
    spec.degree = degrees[rng() % 4];
    CostMeter m;
    const Structure st = build_structure(m, s, spec);
    std::string err = compare_nodes(st, s);
    if (err.empty()) err = exhaustive_queries(st, s, rng);
    if (!err.empty())
      return {false, str("instance ", rep, " (", variant_name(v), ", n=", n, ", sigma=", sigma, "): ", err)};
    ++instances;
  }
  return {true, str(instances, " instances, all four variants, exhaustive probes")};
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  const uint64_t parts[] = {1, 2, 3, 7, 16};
  uint64_t max_n = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const uint64_t n = rep % 25 == 0 ? 1000000 : static_cast<uint64_t>(std::pow(10.0, 1.0 + 5.0 * (rng() % 1000) / 1000.0));
    const uint64_t sigma = 1 + rng() % (rng() % 2 ? 64 : 1024);
    const auto s = mixed(n, sigma, rng);
    const unsigned tau = 1 + rng() % 4;
    const uint64_t P = parts[rng() % 5];
    const bool shaped = rng() % 4 == 0;
    std::vector<std::vector<uint8_t>> archives;
    for (BuildAlgo a : {BuildAlgo::kPacked, BuildAlgo::kSorted, BuildAlgo::kDomain}) {
      StructureSpec spec;
      spec.variant = shaped ? Variant::kShaped : Variant::kTree;
      spec.algo = a;
      spec.params = {tau, P};
      CostMeter m;
      archives.push_back(serialize(build_structure(m, s, spec)));
    }
    if (archives[0] != archives[1] || archives[0] != archives[2])
      return {false, str("config ", rep, " n=", n, " sigma=", sigma, " tau=", tau, " P=", P, " archives differ")};
    max_n = std::max(max_n, n);
  }
  return {true, str("200 configs up to n=", max_n, ", packed/sorted/domain archives byte-identical")};
}

Outcome criterion3() {
  std::mt19937_64 rng(303);
  const auto s = uniform(300000, 200, rng);
  const unsigned before = num_threads();
  struct Case {
    Variant v;
    BuildAlgo a;
  };
  const Case cases[] = {{Variant::kTree, BuildAlgo::kNaive},   {Variant::kTree, BuildAlgo::kPacked},
                        {Variant::kTree, BuildAlgo::kSorted},  {Variant::kTree, BuildAlgo::kDomain},
                        {Variant::kShaped, BuildAlgo::kSorted}, {Variant::kMultiary, BuildAlgo::kPacked},
                        {Variant::kMatrix, BuildAlgo::kPacked}};
  Outcome out;
  for (const Case& c : cases) {
    std::vector<uint8_t> ref;
    CostMeter ref_meter;
    for (unsigned t : {1u, 2u, 8u}) {
      set_num_threads(t);
      StructureSpec spec;
      spec.variant = c.v;
      spec.algo = c.a;
      spec.params.parts = 5;
      CostMeter m;
      auto bytes = serialize(build_structure(m, s, spec));
      if (t == 1) {
        ref = std::move(bytes);
        ref_meter = m;
      } else if (bytes != ref || !(m == ref_meter)) {
        set_num_threads(before);
        return {false, str(variant_name(c.v), "/", algo_name(c.a), " differs at ", t, " threads")};
      }
    }
  }
  set_num_threads(before);
  return {true, "7 builder configurations at 1, 2, 8 threads: identical bytes and meters"};
}

Outcome criterion4() {
  std::mt19937_64 rng(404);
  uint64_t checks = 0;
  auto fail = [](const std::string& what) { return Outcome{false, what}; };

  // Binary: exhaustive small, sampled large.
  for (uint64_t n : {0u, 1u, 64u, 100u, 4095u, 4096u}) {
    for (double p : {0.0, 0.1, 0.5, 1.0}) {
      PackedBitVector v(n);
      for (uint64_t i = 0; i < n; ++i) v.set(i, std::generate_canonical<double, 53>(rng) < p);
      const BinaryRS rs = BinaryRS::build(v);
      for (uint64_t i = 0; i < n; ++i, ++checks)
        if (rs.rank1(i) + rs.rank0(i) != i + 1) return fail(str("binary rank1+rank0 at n=", n, " i=", i));
      for (bool b : {false, true})
        for (uint64_t j = 1; j <= rs.count(b); ++j, ++checks)
          if (rs.rank(b, rs.select(b, j)) != j || rs[rs.select(b, j)] != b)
            return fail(str("binary rank(select) at n=", n, " j=", j));
    }
  }
  {
    const uint64_t n = 1000000;
    PackedBitVector v(n);
    for (uint64_t i = 0; i < n; ++i) v.set(i, rng() % 3 == 0);
    const BinaryRS rs = BinaryRS::build(v);
    for (int k = 0; k < 10000; ++k, ++checks) {
      const uint64_t i = rng() % n;
      if (rs.rank1(i) + rs.rank0(i) != i + 1) return fail(str("binary rank1+rank0 at i=", i));
      const bool b = rng() & 1;
      const uint64_t j = 1 + rng() % rs.count(b);
      if (rs.rank(b, rs.select(b, j)) != j) return fail(str("binary rank(select) j=", j));
    }
  }

  // Generalized and wavelet structures.
  auto seq_identities = [&](const auto& rank_le, const auto& rank, const auto& select, const auto& access,
                            uint64_t n, uint64_t sigma, bool exhaustive) -> std::string {
    std::vector<uint64_t> count(sigma, 0);
    const uint64_t probes = exhaustive ? n : 10000;
    for (uint64_t k = 0; k < probes; ++k, ++checks) {
      const uint64_t i = exhaustive ? k : rng() % n;
      if (rank_le(sigma - 1, i) != i + 1) return str("rank_le(sigma-1, ", i, ")");
      const uint64_t c = access(i);
      const uint64_t r = rank(c, i);
      if (select(c, r) != i) return str("select(c, rank(c, i)) at ", i);
      const uint64_t cc = exhaustive ? k % sigma : rng() % sigma;
      const uint64_t rr = rank(cc, i);
      if (rr > 0 && select(cc, rr) > i) return str("select(rank) bound at ", i);
      if (rr > 0 && rank(cc, select(cc, rr)) != rr) return str("rank(select) at ", i);
      if (cc > 0 && rank_le(cc, i) - rank_le(cc - 1, i) != rr) return str("rank_le difference at ", i);
    }
    return {};
  };

  for (int rep = 0; rep < 40; ++rep) {
    const uint64_t n = 1 + rng() % 4096;
    const unsigned sigma = 1 + rng() % 16;
    const auto s = uniform(n, sigma, rng);
    const GeneralRS g = GeneralRS::build(PackedList::pack(s, symbol_width(sigma)), sigma);
    auto e = seq_identities([&](uint64_t c, uint64_t i) { return g.rank_le(c, i); },
                            [&](uint64_t c, uint64_t i) { return g.rank(c, i); },
                            [&](uint64_t c, uint64_t j) { return g.select(c, j); },
                            [&](uint64_t i) { return uint64_t{g[i]}; }, n, sigma, true);
    if (!e.empty()) return fail("general: " + e);
    // Dense full alphabet so sigma-1 is the largest symbol.
    std::vector<uint64_t> full = uniform(n, 64, rng);
    for (uint64_t c = 0; c < 64 && c < n; ++c) full[c] = c;
    const uint64_t fs = n >= 64 ? 64 : *std::max_element(full.begin(), full.end()) + 1;
    CostMeter m;
    const WaveletTree t = build_wavelet_tree(m, full, static_cast<BuildAlgo>(rep % 4), BuildParams{0, 3});
    const WaveletMatrix w = WaveletMatrix::build(m, full);
    for (int which = 0; which < 2; ++which) {
      auto rk = [&](uint64_t c, uint64_t i) { return which ? w.rank(c, i) : t.rank(c, i); };
      auto rl = [&](uint64_t c, uint64_t i) { return which ? w.rank_le(c, i) : t.rank_le(c, i); };
      auto sl = [&](uint64_t c, uint64_t j) { return which ? w.select(c, j) : t.select(c, j); };
      auto ac = [&](uint64_t i) { return which ? w.access(i) : t.access(i); };
      e = seq_identities(rl, rk, sl, ac, n, fs, true);
      if (!e.empty()) return fail((which ? "matrix: " : "tree: ") + e);
    }
  }
  {
    const uint64_t n = 1000000;
    const auto s = uniform(n, 16, rng);
    const GeneralRS g = GeneralRS::build(PackedList::pack(s, 4), 16);
    auto e = seq_identities([&](uint64_t c, uint64_t i) { return g.rank_le(c, i); },
                            [&](uint64_t c, uint64_t i) { return g.rank(c, i); },
                            [&](uint64_t c, uint64_t j) { return g.select(c, j); },
                            [&](uint64_t i) { return uint64_t{g[i]}; }, n, 16, false);
    if (!e.empty()) return fail("general n=10^6: " + e);
    const auto big = uniform(n, 256, rng);
    CostMeter m;
    const WaveletTree t = build_wavelet_tree(m, big, BuildAlgo::kSorted, {});
    e = seq_identities([&](uint64_t c, uint64_t i) { return t.rank_le(c, i); },
                       [&](uint64_t c, uint64_t i) { return t.rank(c, i); },
                       [&](uint64_t c, uint64_t j) { return t.select(c, j); }, [&](uint64_t i) { return t.access(i); },
                       n, 256, false);
    if (!e.empty()) return fail("tree n=10^6: " + e);
  }
  return {true, str(checks, " identity checks, exact")};
}

// Bitmap construction work over aligned codes of a uniform sigma=256 input.
struct BuilderMeters {
  CostMeter naive, packed, sorted;
};

BuilderMeters builder_meters(uint64_t n, bool want_naive, bool want_packed, bool want_sorted) {
  std::mt19937_64 rng(505 + n);
  const auto raw = uniform(n, 256, rng);
  CostMeter prep;
  MappedSequence ms = map_alphabet(raw);
  const CodeShape shape = CodeShape::balanced(ms.map.size());
  const auto aligned = aligned_codes(prep, ms.codes, shape);
  const unsigned tau = resolve_tau(0, n, shape.height());
  BuilderMeters out;
  if (want_naive) build_bitmaps_naive(out.naive, aligned, shape);
  if (want_packed) build_bitmaps_packed(out.packed, aligned, shape, tau);
  if (want_sorted) build_bitmaps_sorted(out.sorted, aligned, shape, tau);
  return out;
}

Outcome criterion5() {
  std::vector<double> ratio;
  std::string detail = "naive/packed work:";
  for (unsigned lg : {16u, 18u, 20u, 22u}) {
    const auto m = builder_meters(uint64_t{1} << lg, true, true, false);
    ratio.push_back(static_cast<double>(m.naive.work) / static_cast<double>(m.packed.work));
    detail += str(" 2^", lg, "=", std::to_string(ratio.back()).substr(0, 5));
  }
  bool monotone = true;
  for (size_t k = 1; k < ratio.size(); ++k) monotone &= ratio[k] >= ratio[k - 1];
  const bool big_enough = ratio.back() >= 1.5;
  if (!monotone) detail += " (not monotone)";
  if (!big_enough) detail += " (below 1.5 at 2^22)";
  return {monotone && big_enough, detail};
}

Outcome criterion6() {
  std::vector<uint64_t> span;
  std::string detail = "sorted-builder span:";
  for (unsigned lg : {16u, 18u, 20u, 22u}) {
    span.push_back(builder_meters(uint64_t{1} << lg, false, false, true).sorted.span);
    detail += str(" 2^", lg, "=", span.back());
  }
  double worst = 0;
  for (size_t k = 1; k < span.size(); ++k)
    worst = std::max(worst, static_cast<double>(span[k]) / static_cast<double>(span[k - 1]));
  detail += str("; worst 4x ratio ", std::to_string(worst).substr(0, 5));
  return {worst <= 2.5, detail};
}

// Least-squares fit of y = c*x + T; returns the largest relative residual.
double fit_residual(const std::vector<double>& x, const std::vector<double>& y, double& c, double& T) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  c = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  T = (sy - c * sx) / k;
  double worst = 0;
  for (size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - (c * x[i] + T)) / y[i]);
  return worst;
}

Outcome criterion7() {
  std::mt19937_64 rng(707);
  std::vector<double> xb, yb, xg, yg;
  const unsigned sigma = 16;
  const unsigned b = ceil_log2(sigma);
  for (unsigned lg = 16; lg <= 24; ++lg) {
    const uint64_t n = uint64_t{1} << lg;
    PackedBitVector v(n);
    for (uint64_t i = 0; i < n; i += 64) v.write_bits(i, rng(), 64);
    CostMeter mb;
    build_binary_rank(mb, v);
    xb.push_back(static_cast<double>(n) / 64);
    yb.push_back(static_cast<double>(mb.work));

    PackedList seq = PackedList::pack(uniform(n, sigma, rng), b);
    CostMeter mg;
    build_general_rank(mg, seq, sigma);
    xg.push_back(static_cast<double>(n) * b / 64);
    yg.push_back(static_cast<double>(mg.work));
  }
  double cb, Tb, cg, Tg;
  const double rb = fit_residual(xb, yb, cb, Tb);
  const double rg = fit_residual(xg, yg, cg, Tg);
  auto f = [](double d) { return std::to_string(d).substr(0, 6); };
  return {rb <= 0.10 && rg <= 0.10, str("binary c=", f(cb), " T=", f(Tb), " max residual ", f(100 * rb),
                                        "%; general(sigma=16) c=", f(cg), " T=", f(Tg), " max residual ", f(100 * rg),
                                        "%; n=2^16..2^24")};
}

Outcome criterion8() {
  uint64_t vectors = 0;
  for (unsigned sigma = 1; sigma <= 6; ++sigma) {
    std::vector<uint64_t> f(sigma, 0);
    while (true) {
      if (std::any_of(f.begin(), f.end(), [](uint64_t x) { return x > 0; })) {
        const Codebook book = huffman_codebook(f);
        book.validate();
        const uint64_t got = code_cost(book, f), want = oracle::optimal_code_cost(f);
        if (got != want) return {false, str("sigma=", sigma, " vector #", vectors, ": cost ", got, " vs ", want)};
        ++vectors;
      }
      size_t k = 0;
      while (k < sigma && f[k] == 8) f[k++] = 0;
      if (k == sigma) break;
      ++f[k];
    }
  }
  return {true, str(vectors, " frequency vectors (sigma<=6, entries 0..8) match exhaustive search")};
}

Outcome criterion9() {
  std::mt19937_64 rng(909);
  uint64_t instances = 0;
  // Each level is the stable partition of the previous one by its bit.
  auto check = [&](const std::vector<uint64_t>& s, unsigned tau, bool sampled) -> std::string {
    CostMeter m;
    const WaveletMatrix wm = WaveletMatrix::build(m, s, tau);
    const oracle::Dense d = oracle::dense(s);
    const unsigned h = wm.levels();
    std::vector<uint64_t> cur = d.codes;
    for (unsigned l = 0; l < h; ++l) {
      const unsigned shift = h - 1 - l;
      std::vector<uint64_t> zeros, ones;
      const uint64_t probes = sampled ? 10000 : cur.size();
      for (uint64_t k = 0; k < probes; ++k) {
        const uint64_t i = sampled ? rng() % cur.size() : k;
        if (wm.level(l)[i] != ((cur[i] >> shift) & 1)) return str("level ", l, " bit ", i);
      }
      for (uint64_t c : cur) ((c >> shift) & 1 ? ones : zeros).push_back(c);
      if (wm.zeros(l) != zeros.size()) return str("level ", l, " zero count");
      cur = zeros;
      cur.insert(cur.end(), ones.begin(), ones.end());
    }
    if (!sampled) {
      const auto o = oracle::matrix(s);
      for (unsigned l = 0; l < h; ++l)
        if (bits_of(wm.level(l).bits()) != o.levels[l]) return str("level ", l, " vs oracle module");
    }
    ++instances;
    return {};
  };
  for (int rep = 0; rep < 1000; ++rep) {
    const uint64_t n = rng() % 1025;
    const uint64_t sigma = 1 + rng() % 16;
    auto e = check(mixed(n, sigma, rng), rng() % 5, false);
    if (!e.empty()) return {false, str("n=", n, " sigma=", sigma, ": ", e)};
  }
  for (uint64_t sigma : {16u, 256u}) {
    auto e = check(uniform(1000000, sigma, rng), 0, true);
    if (!e.empty()) return {false, str("n=10^6 sigma=", sigma, ": ", e)};
  }
  return {true, str(instances, " matrices: exhaustive n<=1024 sigma<=16, sampled n=10^6")};
}

Outcome criterion10() {
  std::mt19937_64 rng(1010);
  uint64_t trees = 0, equalities = 0;
  const Variant variants[] = {Variant::kTree, Variant::kShaped, Variant::kMultiary, Variant::kMatrix};
  for (int rep = 0; rep < 400; ++rep) {
    const Variant v = variants[rep % 4];
    const uint64_t n = rng() % 20000;
    const bool full = rep % 3 == 0;
    const uint64_t sigma = full ? (uint64_t{1} << (1 + rng() % 8)) : 1 + rng() % 300;
    std::vector<uint64_t> s = full ? uniform(std::max<uint64_t>(n, sigma), sigma, rng) : mixed(n, sigma, rng);
    if (full)
      for (uint64_t c = 0; c < sigma; ++c) s[c] = c;
    StructureSpec spec;
    spec.variant = v;
    spec.algo = static_cast<BuildAlgo>(rng() % 4);
    spec.params.parts = 1 + rng() % 6;
    spec.degree = 1u << (1 + rng() % 4);
    CostMeter m;
    const Structure st = build_structure(m, s, spec);
    const uint64_t bound = s.size() * ceil_log2(st.sigma());
    if (st.bitmap_bits() > bound)
      return {false, str(variant_name(v), " n=", s.size(), " sigma=", st.sigma(), ": ", st.bitmap_bits(), " > ", bound)};
    if (full && v != Variant::kShaped) {
      if (st.bitmap_bits() != bound)
        return {false, str(variant_name(v), " full alphabet n=", s.size(), ": ", st.bitmap_bits(), " != ", bound)};
      ++equalities;
    }
    ++trees;
  }
  return {true, str(trees, " structures within n*ceil(log2 sigma); equality on ", equalities, " full-alphabet inputs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", criterion1},
      {"cross-algorithm bit equality", criterion2},
      {"determinism across thread counts", criterion3},
      {"rank/select identities", criterion4},
      {"work ratio naive/packed", criterion5},
      {"sorted-builder span growth", criterion6},
      {"rank construction work fit", criterion7},
      {"huffman optimality", criterion8},
      {"wavelet matrix level recurrence", criterion9},
      {"space accounting", criterion10},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu: %s  %s: %s [%.1fs]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
