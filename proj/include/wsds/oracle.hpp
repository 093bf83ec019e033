#pragma once

// Reference implementations on plain arrays. Slow on purpose; nothing here
// calls into the packed, rank/select or builder code.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wsds::oracle {

uint64_t access(std::span<const uint64_t> s, uint64_t i);
uint64_t rank(std::span<const uint64_t> s, uint64_t c, uint64_t i);
uint64_t rank_le(std::span<const uint64_t> s, uint64_t c, uint64_t i);
uint64_t select(std::span<const uint64_t> s, uint64_t c, uint64_t j);

/// Dense codes in sorted order of distinct values.
struct Dense {
  std::vector<uint64_t> codes;
  std::vector<uint64_t> symbols;
};
Dense dense(std::span<const uint64_t> s);

using Bits = std::vector<bool>;
using NodeBits = std::vector<std::pair<uint64_t, Bits>>;  // heap id ascending

/// Balanced tree: node bitmaps by recursive halving of the code range.
NodeBits tree(std::span<const uint64_t> s);

/// Shaped tree for codewords indexed by dense symbol.
NodeBits shaped(std::span<const uint64_t> s, const std::vector<uint64_t>& code, const std::vector<unsigned>& len);

/// Multiary tree: digit sequences by d-ary heap id.
std::vector<std::pair<uint64_t, std::vector<uint64_t>>> multiary(std::span<const uint64_t> s, unsigned d);

struct Matrix {
  std::vector<Bits> levels;
  std::vector<uint64_t> zeros;
};
Matrix matrix(std::span<const uint64_t> s);

/// Minimum sum of freq*len over prefix codes, by enumerating every length
/// assignment that satisfies the Kraft inequality.
uint64_t optimal_code_cost(std::span<const uint64_t> freqs);

}  // namespace wsds::oracle
