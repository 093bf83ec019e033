#include <doctest.h>

#include "helpers.hpp"
#include "wsds/oracle.hpp"

using namespace wsds;
using namespace testutil;

TEST_CASE("oracle scans") {
  const auto s = bytes_of(kExample);
  CHECK(oracle::rank(s, 'a', 4) == 2);
  CHECK(oracle::select(s, 'h', 1) == 6);
  CHECK(oracle::access(s, 5) == 'e');
  for (uint64_t i = 0; i < s.size(); ++i) CHECK(oracle::rank_le(s, 'h', i) == i + 1);
  CHECK_THROWS_AS(oracle::select(s, 'f', 3), OccurrenceOutOfRange);
  CHECK_THROWS_AS(oracle::rank(s, 'f', 11), IndexOutOfRange);
}

TEST_CASE("oracle structures") {
  const auto s = bytes_of(kExample);
  auto t = oracle::tree(s);
  REQUIRE(!t.empty());
  CHECK(t[0].first == 0);
  CHECK(t[0].second == bools_of("00110110110"));

  auto e = oracle::tree({});
  REQUIRE(e.size() == 1);
  CHECK(e[0].second.empty());

  std::vector<uint64_t> two{3, 8, 8, 3};
  auto t2 = oracle::tree(two);
  REQUIRE(t2.size() == 1);
  CHECK(t2[0].second == bools_of("0110"));

  auto m = oracle::matrix(two);
  REQUIRE(m.levels.size() == 1);
  CHECK(m.levels[0] == bools_of("0110"));
  CHECK(m.zeros[0] == 2);

  std::vector<uint64_t> f{4, 2, 1, 1};
  // lengths 1,2,3,3: 4 + 4 + 3 + 3
  CHECK(oracle::optimal_code_cost(f) == 14);
  std::vector<uint64_t> eq{1, 1, 1, 1};
  CHECK(oracle::optimal_code_cost(eq) == 8);
}
