#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wsds {

inline constexpr unsigned kWordBits = 64;

/// Precondition failure on arguments (bad width, bad key, bad flag combination).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Position argument outside [0, n).
class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Occurrence number j with j == 0 or j > count.
class OccurrenceOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Archive bytes that fail validation.
class CorruptArchive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~uint64_t{0} : ((uint64_t{1} << bits) - 1);
}

/// ceil(log2(x)); 0 for x <= 1.
inline constexpr unsigned ceil_log2(uint64_t x) {
  return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

/// Bits needed to store any value in [0, x); at least 1.
inline constexpr unsigned width_for_below(uint64_t x) {
  return x <= 2 ? 1u : static_cast<unsigned>(std::bit_width(x - 1));
}

inline constexpr uint64_t words_for_bits(uint64_t bits) { return (bits + 63) / 64; }

/// Size parameters derived from a sequence length n.
///   L      = max(1, ceil(log2 max(n, 2)))
///   lambda = max(1, ceil(log2 L))
///   kappa  = min(16, max(8, floor(L / 2)))   lookup-table key width
struct SizeParams {
  uint64_t L = 1;
  uint64_t lambda = 1;
  unsigned kappa = 8;

  static SizeParams for_length(uint64_t n) {
    SizeParams p;
    p.L = std::max<uint64_t>(1, ceil_log2(std::max<uint64_t>(n, 2)));
    p.lambda = std::max<uint64_t>(1, ceil_log2(p.L));
    p.kappa = static_cast<unsigned>(std::min<uint64_t>(16, std::max<uint64_t>(8, p.L / 2)));
    return p;
  }

  bool operator==(const SizeParams&) const = default;
};

}  // namespace wsds
