#pragma once

// Binary wavelet trees: the balanced tree over dense codes and the shaped tree
// over arbitrary prefix-free codewords share one representation.
//
// Node (level l, prefix q) has heap id 2^l - 1 + q; its children are 2i+1 and
// 2i+2. Every symbol code is left-aligned to the tree height h, so the bit a
// symbol contributes at level l is bit (h-1-l) of its aligned code. A node is
// internal when some codeword continues below it; internal nodes that receive
// no elements are absent, except the root.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wsds/bits.hpp"
#include "wsds/io.hpp"
#include "wsds/par.hpp"
#include "wsds/rsb.hpp"

namespace wsds {

inline constexpr unsigned kMaxCodeLength = 57;

inline uint64_t heap_id(unsigned level, uint64_t prefix) { return (uint64_t{1} << level) - 1 + prefix; }
inline unsigned heap_level(uint64_t id) { return static_cast<unsigned>(std::bit_width(id + 1)) - 1; }

/// Sorted distinct raw symbols; dense code = index.
class AlphabetMap {
 public:
  AlphabetMap() = default;
  explicit AlphabetMap(std::vector<uint64_t> sorted_symbols) : symbols_(std::move(sorted_symbols)) {}

  uint64_t size() const { return symbols_.size(); }
  const std::vector<uint64_t>& symbols() const { return symbols_; }
  uint64_t raw(uint64_t code) const { return symbols_[code]; }
  std::optional<uint64_t> code(uint64_t raw) const;
  /// Number of alphabet symbols <= raw.
  uint64_t count_le(uint64_t raw) const;

  bool operator==(const AlphabetMap&) const = default;

 private:
  std::vector<uint64_t> symbols_;
};

struct MappedSequence {
  PackedList codes;
  AlphabetMap map;
};

/// Dense codes of width max(1, ceil(log2 sigma)).
MappedSequence map_alphabet(std::span<const uint64_t> raw);

/// Codeword per dense symbol; len 0 marks a symbol without a codeword.
struct Codebook {
  std::vector<uint64_t> code;
  std::vector<unsigned> len;

  uint64_t size() const { return code.size(); }
  unsigned height() const;
  /// Throws ContractViolation unless the nonempty codewords are prefix-free and fit.
  void validate() const;
  bool operator==(const Codebook&) const = default;
};

/// Fixed-length codebook: symbol c gets code c on h bits.
Codebook balanced_codebook(uint64_t sigma);

/// Which (level, prefix) pairs are internal and how symbols map to aligned codes.
class CodeShape {
 public:
  enum class Kind : uint8_t { kBalanced = 0, kShaped = 1 };

  CodeShape() = default;
  /// Balanced over sigma dense codes. sigma == 1 has no internal nodes; sigma == 0
  /// (empty input) keeps an empty root.
  static CodeShape balanced(uint64_t sigma);
  static CodeShape shaped(Codebook book);

  Kind kind() const { return kind_; }
  unsigned height() const { return h_; }
  uint64_t sigma() const { return sigma_; }
  const Codebook& book() const { return book_; }

  bool internal(unsigned level, uint64_t prefix) const {
    if (kind_ == Kind::kBalanced) return has_root_ && level < h_;
    return internal_.count(heap_id(level, prefix)) != 0;
  }
  bool internal_id(uint64_t id) const { return internal(heap_level(id), id + 1 - (uint64_t{1} << heap_level(id))); }

  uint64_t aligned(uint64_t c) const {
    return kind_ == Kind::kBalanced ? c : book_.code[c] << (h_ - book_.len[c]);
  }
  unsigned length(uint64_t c) const { return kind_ == Kind::kBalanced ? (has_root_ ? h_ : 0) : book_.len[c]; }
  /// Symbol whose codeword ends at (level, prefix), if any.
  std::optional<uint64_t> symbol_at(unsigned level, uint64_t prefix) const;

  bool operator==(const CodeShape& o) const {
    return kind_ == o.kind_ && h_ == o.h_ && sigma_ == o.sigma_ && has_root_ == o.has_root_ && book_ == o.book_;
  }

 private:
  Kind kind_ = Kind::kBalanced;
  unsigned h_ = 1;
  uint64_t sigma_ = 0;
  bool has_root_ = true;
  Codebook book_;
  std::unordered_set<uint64_t> internal_;
  std::unordered_map<uint64_t, uint64_t> leaf_;
};

/// Node bitmaps keyed by heap id, ascending.
using NodeBitmaps = std::vector<std::pair<uint64_t, PackedBitVector>>;

enum class BuildAlgo : uint8_t { kNaive = 0, kPacked = 1, kSorted = 2, kDomain = 3 };

struct BuildParams {
  unsigned tau = 0;    // 0 picks the default
  uint64_t parts = 1;  // domain decomposition only
};

/// clamp(floor(sqrt(L)), 1, min(height, kappa)).
unsigned default_tau(uint64_t n, unsigned height);
/// Resolves and validates tau for a tree of the given height over n symbols.
unsigned resolve_tau(unsigned requested, uint64_t n, unsigned height);

// Bitmap builders over aligned codes. All produce identical output.
NodeBitmaps build_bitmaps_naive(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape);
NodeBitmaps build_bitmaps_packed(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape,
                                 unsigned tau);
NodeBitmaps build_bitmaps_sorted(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape,
                                 unsigned tau);
NodeBitmaps build_bitmaps_domain(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape,
                                 unsigned tau, uint64_t parts);

struct ShortlistSplit {
  PackedBitVector bitmap;
  PackedList lo, hi;
};
/// Splits a short list on sub-level s with table probes per chunk; lo/hi are
/// skipped when last is set.
ShortlistSplit split_shortlist(CostMeter& meter, const ShortlistTable& table, unsigned s, const PackedList& list,
                               bool last);

/// Concatenation of bit strings in order, word-parallel with boundary words folded.
PackedBitVector concat_bitvectors(CostMeter& meter, std::span<const PackedBitVector* const> parts);

class WaveletTree {
 public:
  struct Node {
    uint64_t id = 0;
    BinaryRS rs;
    bool operator==(const Node&) const = default;
  };

  WaveletTree() = default;
  /// Builds rank/select for every bitmap in parallel; tables shared across nodes.
  WaveletTree(CostMeter& meter, CodeShape shape, AlphabetMap map, uint64_t n, unsigned tau, NodeBitmaps bitmaps);

  uint64_t size() const { return n_; }
  uint64_t sigma() const { return map_.size(); }
  unsigned height() const { return shape_.height(); }
  unsigned tau() const { return tau_; }
  const CodeShape& shape() const { return shape_; }
  const AlphabetMap& alphabet() const { return map_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node* node(uint64_t id) const;
  uint64_t bitmap_bits() const;
  uint64_t structure_bytes() const;

  // Dense-code queries.
  uint64_t access_code(uint64_t i) const;
  uint64_t rank_code(uint64_t c, uint64_t i) const;
  uint64_t select_code(uint64_t c, uint64_t j) const;
  uint64_t rank_le_code(uint64_t c, uint64_t i) const;
  uint64_t count_code(uint64_t c) const;

  // Raw-symbol queries.
  uint64_t access(uint64_t i) const { return map_.raw(access_code(check_index(i))); }
  uint64_t rank(uint64_t raw, uint64_t i) const;
  uint64_t select(uint64_t raw, uint64_t j) const;
  uint64_t rank_le(uint64_t raw, uint64_t i) const;

  void save(ByteWriter& out) const;
  static WaveletTree load(ByteReader& in);

  bool operator==(const WaveletTree& o) const {
    return n_ == o.n_ && tau_ == o.tau_ && shape_ == o.shape_ && map_ == o.map_ && nodes_ == o.nodes_;
  }

 private:
  uint64_t check_index(uint64_t i) const;
  const BinaryRS* rs_at(unsigned level, uint64_t prefix) const;

  uint64_t n_ = 0;
  unsigned tau_ = 1;
  CodeShape shape_;
  AlphabetMap map_;
  std::vector<Node> nodes_;
  std::unordered_map<uint64_t, uint32_t> slot_;
};

/// Map, derive the shape and build with the chosen algorithm.
WaveletTree build_wavelet_tree(CostMeter& meter, std::span<const uint64_t> raw, BuildAlgo algo,
                               const BuildParams& params = {});
/// Shaped tree from a codebook over the dense codes of raw.
WaveletTree build_shaped_tree(CostMeter& meter, std::span<const uint64_t> raw, const Codebook& book, BuildAlgo algo,
                              const BuildParams& params = {});

/// Aligned codes for a dense code sequence.
std::vector<uint64_t> aligned_codes(CostMeter& meter, const PackedList& codes, const CodeShape& shape);

}  // namespace wsds
