#pragma once

// One type over the four structures, plus the archive format.
//
// Archive: "WSDS1", version u32, word size u8, variant u8, n u64, sigma u32,
// d u8, tau u8, then one body section (tag u8, u64 length). Integers are
// little-endian.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wsds/var.hpp"
#include "wsds/wt.hpp"

namespace wsds {

enum class Variant : uint8_t { kTree = 0, kShaped = 1, kMultiary = 2, kMatrix = 3 };

inline constexpr uint32_t kArchiveVersion = 1;

const char* variant_name(Variant v);
Variant parse_variant(const std::string& s);
const char* algo_name(BuildAlgo a);
BuildAlgo parse_algo(const std::string& s);

class Structure {
 public:
  Structure() = default;
  explicit Structure(WaveletTree t) : v_(std::move(t)) {}
  explicit Structure(MultiaryTree t) : v_(std::move(t)) {}
  explicit Structure(WaveletMatrix m) : v_(std::move(m)) {}

  Variant variant() const;
  uint64_t size() const;
  uint64_t sigma() const;
  unsigned tau() const;
  unsigned degree() const;
  /// Bits of node bitmaps (digit sequences count log d bits per symbol).
  uint64_t bitmap_bits() const;
  uint64_t structure_bytes() const;
  const AlphabetMap& alphabet() const;

  uint64_t access(uint64_t i) const;
  uint64_t rank(uint64_t raw, uint64_t i) const;
  uint64_t select(uint64_t raw, uint64_t j) const;
  uint64_t rank_le(uint64_t raw, uint64_t i) const;

  const std::variant<WaveletTree, MultiaryTree, WaveletMatrix>& get() const { return v_; }
  std::variant<WaveletTree, MultiaryTree, WaveletMatrix>& get() { return v_; }

  bool operator==(const Structure&) const = default;

 private:
  std::variant<WaveletTree, MultiaryTree, WaveletMatrix> v_;
};

struct StructureSpec {
  Variant variant = Variant::kTree;
  BuildAlgo algo = BuildAlgo::kPacked;
  BuildParams params;
  unsigned degree = 4;
};

Structure build_structure(CostMeter& meter, std::span<const uint64_t> raw, const StructureSpec& spec);

std::vector<uint8_t> serialize(const Structure& s);
/// Throws CorruptArchive on any malformed input.
Structure deserialize(std::span<const uint8_t> bytes);

}  // namespace wsds
