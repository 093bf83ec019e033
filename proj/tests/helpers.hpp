#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wsds/bits.hpp"

namespace testutil {

inline const std::string kExample = "cafgaehbhfd";

inline std::vector<uint64_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

inline std::vector<bool> random_bools(uint64_t n, double p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution d(p);
  std::vector<bool> b(n);
  for (uint64_t i = 0; i < n; ++i) b[i] = d(rng);
  return b;
}

// Bit scans for rank/select expectations.
inline uint64_t scan_rank(const std::vector<bool>& b, bool v, uint64_t i) {
  uint64_t r = 0;
  for (uint64_t p = 0; p <= i; ++p) r += b[p] == v;
  return r;
}

inline std::vector<uint64_t> positions(const std::vector<bool>& b, bool v) {
  std::vector<uint64_t> out;
  for (uint64_t p = 0; p < b.size(); ++p)
    if (b[p] == v) out.push_back(p);
  return out;
}

inline std::vector<bool> bools_of(const std::string& s) {
  std::vector<bool> b;
  for (char c : s) b.push_back(c == '1');
  return b;
}

}  // namespace testutil
