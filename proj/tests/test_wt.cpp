#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "wsds/archive.hpp"
#include "wsds/oracle.hpp"
#include "wsds/var.hpp"
#include "wsds/verify.hpp"
#include "wsds/wt.hpp"

using namespace wsds;
using namespace testutil;

namespace {

oracle::NodeBits node_bits(const WaveletTree& t) {
  oracle::NodeBits out;
  for (const auto& nd : t.nodes()) {
    oracle::Bits b(nd.rs.size());
    for (uint64_t i = 0; i < b.size(); ++i) b[i] = nd.rs[i];
    out.emplace_back(nd.id, b);
  }
  return out;
}

WaveletTree build(const std::vector<uint64_t>& s, BuildAlgo algo, unsigned tau = 0, uint64_t parts = 1) {
  CostMeter m;
  return build_wavelet_tree(m, s, algo, BuildParams{tau, parts});
}

std::vector<uint64_t> random_seq(uint64_t n, uint64_t sigma, std::mt19937_64& rng) {
  std::vector<uint64_t> s(n);
  for (auto& x : s) x = rng() % sigma;
  return s;
}

}  // namespace

TEST_CASE("alphabet mapping") {
  MappedSequence m = map_alphabet(bytes_of("abca"));
  CHECK(m.codes.unpack() == std::vector<uint64_t>{0, 1, 2, 0});
  CHECK(m.map.size() == 3);

  std::vector<uint64_t> dense{0, 1, 2, 3, 2, 1};
  CHECK(map_alphabet(dense).codes.unpack() == dense);

  MappedSequence f = map_alphabet(bytes_of(kExample));
  CHECK(f.map.size() == 8);
  CHECK(f.codes.unpack() == std::vector<uint64_t>{2, 0, 5, 6, 0, 4, 7, 1, 7, 5, 3});
  CHECK(f.map.count_le('d') == 4);
  CHECK(f.map.count_le(0) == 0);
  CHECK_FALSE(f.map.code('z').has_value());
}

TEST_CASE("example tree bitmaps and queries") {
  const auto s = bytes_of(kExample);
  const auto want = oracle::tree(s);
  for (BuildAlgo a : {BuildAlgo::kNaive, BuildAlgo::kPacked, BuildAlgo::kSorted}) {
    WaveletTree t = build(s, a);
    CHECK(node_bits(t) == want);
  }
  WaveletTree dom = build(s, BuildAlgo::kDomain, 0, 3);
  CHECK(node_bits(dom) == want);

  WaveletTree t = build(s, BuildAlgo::kPacked);
  CHECK(t.node(0)->rs.bits().to_string() == "00110110110");
  CHECK(t.access(5) == 'e');
  CHECK(t.rank('a', 4) == oracle::rank(s, 'a', 4));
  CHECK(t.select('f', 2) == oracle::select(s, 'f', 2));
  CHECK(t.rank_le('d', 10) == oracle::rank_le(s, 'd', 10));
  for (uint64_t i = 0; i < s.size(); ++i) CHECK(t.access(i) == s[i]);
  CHECK(t.rank('z', 10) == 0);
  CHECK(t.rank_le('z', 10) == 11);
  CHECK(t.rank_le('A', 10) == 0);
  CHECK_THROWS_AS(t.select('f', 3), OccurrenceOutOfRange);
  CHECK_THROWS_AS(t.select('z', 1), OccurrenceOutOfRange);
  CHECK_THROWS_AS(t.access(11), IndexOutOfRange);
  CHECK_THROWS_AS(t.rank('a', 11), IndexOutOfRange);
}

TEST_CASE("degenerate alphabets") {
  WaveletTree e = build({}, BuildAlgo::kPacked);
  REQUIRE(e.nodes().size() == 1);
  CHECK(e.node(0)->rs.size() == 0);
  CHECK_THROWS_AS(e.access(0), IndexOutOfRange);

  std::vector<uint64_t> one(100, 42);
  for (BuildAlgo a : {BuildAlgo::kNaive, BuildAlgo::kPacked, BuildAlgo::kSorted, BuildAlgo::kDomain}) {
    WaveletTree t = build(one, a, 0, 3);
    CHECK(t.nodes().empty());
    CHECK(t.access(57) == 42);
    CHECK(t.rank(42, 9) == 10);
    CHECK(t.select(42, 100) == 99);
    CHECK(t.rank_le(42, 9) == 10);
  }

  std::vector<uint64_t> two{5, 9, 9, 5, 9};
  WaveletTree t2 = build(two, BuildAlgo::kSorted);
  REQUIRE(t2.nodes().size() == 1);
  CHECK(t2.node(0)->rs.bits().to_string() == "01101");
}

TEST_CASE("builders agree with the oracle on random instances") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const uint64_t n = rng() % 4097;
    const uint64_t sigma = 1 + rng() % 64;
    const unsigned tau = 1 + rng() % 4;
    const auto s = random_seq(n, sigma, rng);
    const auto want = oracle::tree(s);
    const WaveletTree naive = build(s, BuildAlgo::kNaive);
    REQUIRE(node_bits(naive) == want);
    for (BuildAlgo a : {BuildAlgo::kPacked, BuildAlgo::kSorted, BuildAlgo::kDomain}) {
      CostMeter m;
      WaveletTree t;
      try {
        t = build_wavelet_tree(m, s, a, BuildParams{tau, 1 + rng() % 16});
      } catch (const ContractViolation&) {
        // tau above the table key budget for this n
        CHECK(tau > SizeParams::for_length(n).kappa);
        continue;
      }
      REQUIRE(node_bits(t) == want);
    }
  }
}

TEST_CASE("large instances equal the oracle") {
  std::mt19937_64 rng(22);
  const auto s = random_seq(100000, 200, rng);
  CHECK(node_bits(build(s, BuildAlgo::kPacked)) == oracle::tree(s));

  const auto t = random_seq(100000, 64, rng);
  const WaveletTree ref = build(t, BuildAlgo::kPacked);
  CHECK(build(t, BuildAlgo::kDomain, 0, 1) == ref);
  for (uint64_t p : {2u, 3u, 7u, 16u}) CHECK(build(t, BuildAlgo::kDomain, 0, p) == ref);
  CHECK(build(t, BuildAlgo::kSorted) == ref);
}

TEST_CASE("tau resolution") {
  const unsigned kappa = SizeParams::for_length(1000).kappa;
  CHECK(resolve_tau(0, 1000, 8) == default_tau(1000, 8));
  CHECK(resolve_tau(3, 1000, 8) == 3);
  CHECK(resolve_tau(kappa, 1000, 2) == 2);
  CHECK_THROWS_AS(resolve_tau(kappa + 1, 1000, 8), ContractViolation);
  CHECK(default_tau(1000, 8) >= 1);
}

TEST_CASE("shaped trees") {
  const auto s = bytes_of(kExample);
  const auto d = oracle::dense(s);
  CostMeter m;

  WaveletTree bal = build_shaped_tree(m, s, balanced_codebook(d.symbols.size()), BuildAlgo::kPacked, {});
  CHECK(node_bits(bal) == oracle::tree(s));

  // A skewed prefix code over the eight symbols.
  Codebook book;
  book.code = {0b0, 0b10, 0b110, 0b1110, 0b11110, 0b111110, 0b1111110, 0b1111111};
  book.len = {1, 2, 3, 4, 5, 6, 7, 7};
  const auto want = oracle::shaped(s, book.code, book.len);
  for (BuildAlgo a : {BuildAlgo::kNaive, BuildAlgo::kPacked, BuildAlgo::kSorted, BuildAlgo::kDomain}) {
    WaveletTree t = build_shaped_tree(m, s, book, a, BuildParams{2, 3});
    CHECK(node_bits(t) == want);
    for (uint64_t i = 0; i < s.size(); ++i) REQUIRE(t.access(i) == s[i]);
    CHECK(t.rank_le('d', 10) == oracle::rank_le(s, 'd', 10));
  }

  Codebook bad;
  bad.code = {0b0, 0b01};
  bad.len = {1, 2};
  CHECK_THROWS_AS(bad.validate(), ContractViolation);

  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const auto r = random_seq(1 + rng() % 3000, 1 + rng() % 40, rng);
    StructureSpec spec;
    spec.variant = Variant::kShaped;
    spec.algo = static_cast<BuildAlgo>(rng() % 4);
    spec.params.parts = 1 + rng() % 5;
    CostMeter mm;
    Structure st = build_structure(mm, r, spec);
    auto fail = check_structure(st, r);
    REQUIRE_MESSAGE(!fail, *fail);
  }
}

TEST_CASE("tree archive round trip") {
  std::mt19937_64 rng(24);
  const auto s = random_seq(5000, 37, rng);
  Structure st(build(s, BuildAlgo::kSorted));
  const auto bytes = serialize(st);
  Structure back = deserialize(bytes);
  CHECK(back == st);
  CHECK(serialize(back) == bytes);

  std::vector<uint8_t> cut(bytes.begin(), bytes.end() - 1);
  CHECK_THROWS_AS(deserialize(cut), CorruptArchive);
  auto bad_version = bytes;
  bad_version[5] = 2;
  CHECK_THROWS_AS(deserialize(bad_version), CorruptArchive);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize(bad_magic), CorruptArchive);
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(deserialize(extra), CorruptArchive);
}
