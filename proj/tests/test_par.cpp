#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "wsds/par.hpp"

using namespace wsds;

TEST_CASE("prefix_sum on small inputs") {
  CostMeter m;
  auto r = prefix_sum(m, std::span<const uint64_t>{});
  CHECK(r.prefixes.empty());
  CHECK(r.total == 0);

  std::vector<uint64_t> x{3, 1, 2};
  auto s = prefix_sum(m, std::span<const uint64_t>(x));
  std::vector<uint64_t> want(x.size());
  uint64_t acc = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    want[i] = acc;
    acc += x[i];
  }
  CHECK(s.prefixes == want);
  CHECK(s.total == acc);
}

TEST_CASE("prefix_sum equals serial left fold for a non-commutative op") {
  // 2x2 integer matrices mod 2^64 under multiplication.
  using Mat = std::array<uint64_t, 4>;
  auto mul = [](const Mat& a, const Mat& b) {
    return Mat{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
               a[2] * b[1] + a[3] * b[3]};
  };
  const Mat id{1, 0, 0, 1};
  std::mt19937_64 rng(7);
  for (size_t n : {1u, 2u, 5u, 511u, 512u, 513u, 3000u}) {
    std::vector<Mat> x(n);
    for (auto& v : x) v = {rng() % 5, rng() % 5, rng() % 5, rng() % 5};
    CostMeter m;
    auto r = prefix_sum(m, std::span<const Mat>(x), mul, id, 8);
    Mat acc = id;
    for (size_t i = 0; i < n; ++i) {
      REQUIRE(r.prefixes[i] == acc);
      acc = mul(acc, x[i]);
    }
    CHECK(r.total == acc);
  }
}

TEST_CASE("parallel_for runs every body and charges sum and max") {
  CostMeter m;
  parallel_for(m, 0, [](size_t, CostMeter&) { FAIL("no bodies expected"); });
  CHECK(m.work == 0);

  std::vector<size_t> a(8, 99);
  parallel_for(m, a.size(), [&](size_t i, CostMeter& mm) {
    a[i] = i;
    mm.charge(1);
  });
  for (size_t i = 0; i < 8; ++i) CHECK(a[i] == i);
  CHECK(m.work == 8);

  CostMeter big;
  const size_t n = 5000;
  parallel_for(big, n, [&](size_t i, CostMeter& mm) { mm.charge(i == 17 ? 100 : 2); });
  CHECK(big.work == 2 * (n - 1) + 100);
  CHECK(big.span == 100 + ceil_log2(n));
}

TEST_CASE("meters do not depend on the thread count") {
  std::vector<uint64_t> x(100000);
  std::mt19937_64 rng(3);
  for (auto& v : x) v = rng() % 1000;
  const unsigned before = num_threads();
  set_num_threads(1);
  CostMeter m1;
  auto r1 = prefix_sum(m1, std::span<const uint64_t>(x));
  set_num_threads(4);
  CostMeter m4;
  auto r4 = prefix_sum(m4, std::span<const uint64_t>(x));
  set_num_threads(before);
  CHECK(r1.prefixes == r4.prefixes);
  CHECK(m1 == m4);
}

TEST_CASE("stable_sort_by_key") {
  CostMeter m;
  std::vector<SortItem> in{{1, 'a'}, {0, 'b'}, {1, 'c'}};
  auto out = stable_sort_by_key(m, in, 1);
  CHECK(out == std::vector<SortItem>{{0, 'b'}, {1, 'a'}, {1, 'c'}});
  CHECK(stable_sort_by_key(m, out, 1) == out);

  std::vector<SortItem> bad{{4, 0}};
  CHECK_THROWS_AS(stable_sort_by_key(m, bad, 2), ContractViolation);

  std::mt19937_64 rng(11);
  for (unsigned bits : {5u, 16u, 20u}) {
    std::vector<SortItem> items(bits == 5 ? 10000 : 70000);
    for (size_t i = 0; i < items.size(); ++i) items[i] = {rng() & low_mask(bits), i};
    auto want = items;
    std::stable_sort(want.begin(), want.end(), [](const SortItem& a, const SortItem& b) { return a.key < b.key; });
    CHECK(stable_sort_by_key(m, items, bits) == want);
  }
}
