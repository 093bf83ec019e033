#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "wsds/io.hpp"
#include "wsds/oracle.hpp"
#include "wsds/rsg.hpp"

using namespace wsds;
using namespace testutil;

namespace {

GeneralRS make(const std::vector<uint64_t>& s, unsigned sigma) {
  return GeneralRS::build(PackedList::pack(s, symbol_width(sigma)), sigma);
}

void check_all(const GeneralRS& rs, const std::vector<uint64_t>& s, unsigned sigma) {
  std::vector<uint64_t> cnt(sigma, 0);
  std::vector<std::vector<uint64_t>> pos(sigma);
  for (uint64_t i = 0; i < s.size(); ++i) {
    ++cnt[s[i]];
    pos[s[i]].push_back(i);
    uint64_t le = 0;
    for (unsigned c = 0; c < sigma; ++c) {
      le += cnt[c];
      REQUIRE(rs.rank_le(c, i) == le);
      REQUIRE(rs.rank(c, i) == cnt[c]);
    }
  }
  for (unsigned c = 0; c < sigma; ++c) {
    REQUIRE(rs.count(c) == pos[c].size());
    for (uint64_t j = 1; j <= pos[c].size(); ++j) REQUIRE(rs.select(c, j) == pos[c][j - 1]);
    CHECK_THROWS_AS(rs.select(c, pos[c].size() + 1), OccurrenceOutOfRange);
  }
}

}  // namespace

TEST_CASE("generalized rank/select on the example sequence") {
  const auto d = oracle::dense(bytes_of(kExample));
  const std::vector<uint64_t> s = d.codes;
  REQUIRE(d.symbols.size() == 8);
  GeneralRS rs = make(s, 8);
  const uint64_t dcode = 'd' - 'a', h = 'h' - 'a', f = 'f' - 'a';
  CHECK(rs.rank_le(dcode, 10) == oracle::rank_le(s, dcode, 10));
  CHECK(rs.rank_le(dcode, 10) == 5);
  CHECK(rs.select(h, 2) == oracle::select(s, h, 2));
  CHECK(rs.select(f, 2) == oracle::select(s, f, 2));
  check_all(rs, s, 8);
}

TEST_CASE("generalized rank/select small alphabets and edges") {
  std::vector<uint64_t> one(5000, 0);
  GeneralRS r1 = make(one, 1);
  for (uint64_t i = 0; i < one.size(); ++i) REQUIRE(r1.rank_le(0, i) == i + 1);

  std::vector<uint64_t> cst(10000, 0);
  GeneralRS rc = make(cst, 4);
  for (uint64_t j = 1; j <= cst.size(); ++j) REQUIRE(rc.select(0, j) == j - 1);

  GeneralRS empty = make({}, 3);
  CHECK(empty.size() == 0);
  CHECK_THROWS_AS(empty.select(0, 1), OccurrenceOutOfRange);

  std::mt19937_64 rng(1);
  for (unsigned sigma : {2u, 3u, 5u, 8u, 13u, 16u})
    for (uint64_t n : {1u, 100u, 4000u, 20000u}) {
      std::vector<uint64_t> s(n);
      for (auto& x : s) x = rng() % sigma;
      check_all(make(s, sigma), s, sigma);
    }

  std::vector<uint64_t> bad{0, 1, 5};
  CHECK_THROWS_AS(make(bad, 3), ContractViolation);
}

TEST_CASE("generalized rank/select on skewed and random inputs") {
  const uint64_t n = 100000;
  std::mt19937_64 rng(2);
  std::vector<uint64_t> zipf(n), uni(n);
  std::discrete_distribution<unsigned> dist({512, 128, 32, 8, 4, 2, 1, 1});
  for (auto& x : zipf) x = dist(rng);
  for (auto& x : uni) x = rng() % 8;
  for (const auto* s : {&zipf, &uni}) {
    GeneralRS rs = make(*s, 8);
    std::vector<std::vector<uint64_t>> pos(8);
    std::vector<std::vector<uint64_t>> pre(8, std::vector<uint64_t>(n + 1, 0));
    for (uint64_t i = 0; i < n; ++i) {
      pos[(*s)[i]].push_back(i);
      for (unsigned c = 0; c < 8; ++c) pre[c][i + 1] = pre[c][i] + ((*s)[i] == c);
    }
    for (int k = 0; k < 10000; ++k) {
      const uint64_t i = rng() % n;
      const unsigned c = rng() % 8;
      uint64_t le = 0;
      for (unsigned x = 0; x <= c; ++x) le += pre[x][i + 1];
      REQUIRE(rs.rank_le(c, i) == le);
      REQUIRE(rs.rank_le(7, i) == i + 1);
      if (c > 0) REQUIRE(rs.rank_le(c, i) - rs.rank_le(c - 1, i) == pre[c][i + 1]);
      if (!pos[c].empty()) {
        const uint64_t j = 1 + rng() % pos[c].size();
        REQUIRE(rs.select(c, j) == pos[c][j - 1]);
        REQUIRE(rs.rank(c, rs.select(c, j)) == j);
        if (j > 1) REQUIRE(rs.select(c, j - 1) < rs.select(c, j));
      }
    }
  }
}

TEST_CASE("occurrence windows combine associatively") {
  using W = OccurrenceWindow;
  const uint64_t none = W::kNone;
  std::vector<W> ws{{none, none}, {3, 3}, {1, 9}, {4, 7}, {none, none}, {0, 2}};
  for (const auto& a : ws)
    for (const auto& b : ws)
      for (const auto& c : ws) REQUIRE((a + b) + c == a + (b + c));
  CHECK(W{} + W{2, 5} == W{2, 5});
  CHECK(W{2, 5} + W{} == W{2, 5});
  CHECK(W{2, 5} + W{8, 9} == W{2, 9});
}

TEST_CASE("generalized rank/select save and load") {
  std::vector<uint64_t> s(9000);
  std::mt19937_64 rng(3);
  for (auto& x : s) x = rng() % 11;
  GeneralRS rs = make(s, 11);
  ByteWriter w;
  rs.save(w);
  ByteReader r(w.bytes());
  CHECK(GeneralRS::load(r) == rs);
  std::vector<uint8_t> cut(w.bytes().begin(), w.bytes().begin() + w.bytes().size() / 2);
  ByteReader rc(cut);
  CHECK_THROWS_AS(GeneralRS::load(rc), CorruptArchive);
}
