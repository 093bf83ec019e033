#pragma once

// Wavelet variants: Huffman codebooks for shaped trees, multiary trees over
// d-ary digits, and the wavelet matrix.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "wsds/io.hpp"
#include "wsds/par.hpp"
#include "wsds/rsb.hpp"
#include "wsds/rsg.hpp"
#include "wsds/wt.hpp"

namespace wsds {

/// Optimal prefix code. Ties merge the lower (frequency, smallest symbol) first;
/// codes are canonical in (length, symbol) order. Zero-frequency symbols get
/// no codeword; a lone symbol gets the empty codeword.
Codebook huffman_codebook(std::span<const uint64_t> freqs);

/// Sum of freq * length.
uint64_t code_cost(const Codebook& book, std::span<const uint64_t> freqs);

class MultiaryTree {
 public:
  struct Node {
    uint64_t id = 0;
    GeneralRS rs;
    bool operator==(const Node&) const = default;
  };

  MultiaryTree() = default;

  static MultiaryTree build(CostMeter& meter, std::span<const uint64_t> raw, unsigned degree, unsigned tau = 0);

  uint64_t size() const { return n_; }
  uint64_t sigma() const { return map_.size(); }
  unsigned degree() const { return d_; }
  unsigned tau() const { return tau_; }
  unsigned code_bits() const { return h_; }
  unsigned levels() const { return levels_; }
  /// Digit width at level beta; the last level may be narrower.
  unsigned digit_bits(unsigned beta) const;
  const AlphabetMap& alphabet() const { return map_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node* node(uint64_t id) const;
  uint64_t child(uint64_t id, uint64_t digit) const { return id * d_ + 1 + digit; }
  uint64_t digit_bits_total() const;
  uint64_t structure_bytes() const;

  uint64_t access_code(uint64_t i) const;
  uint64_t rank_code(uint64_t c, uint64_t i) const;
  uint64_t select_code(uint64_t c, uint64_t j) const;
  uint64_t rank_le_code(uint64_t c, uint64_t i) const;

  uint64_t access(uint64_t i) const;
  uint64_t rank(uint64_t raw, uint64_t i) const;
  uint64_t select(uint64_t raw, uint64_t j) const;
  uint64_t rank_le(uint64_t raw, uint64_t i) const;

  void save(ByteWriter& out) const;
  static MultiaryTree load(ByteReader& in);

  bool operator==(const MultiaryTree& o) const {
    return n_ == o.n_ && d_ == o.d_ && tau_ == o.tau_ && map_ == o.map_ && nodes_ == o.nodes_;
  }

 private:
  void init_shape(uint64_t n, unsigned degree);
  uint64_t digit(uint64_t c, unsigned beta) const;
  uint64_t check_index(uint64_t i) const;
  void index_nodes();

  uint64_t n_ = 0;
  unsigned d_ = 2;
  unsigned logd_ = 1;
  unsigned tau_ = 1;
  unsigned h_ = 1;
  unsigned levels_ = 1;
  bool has_root_ = true;
  AlphabetMap map_;
  std::vector<Node> nodes_;
  std::unordered_map<uint64_t, uint32_t> slot_;
};

class WaveletMatrix {
 public:
  WaveletMatrix() = default;

  static WaveletMatrix build(CostMeter& meter, std::span<const uint64_t> raw, unsigned tau = 0);

  uint64_t size() const { return n_; }
  uint64_t sigma() const { return map_.size(); }
  unsigned tau() const { return tau_; }
  unsigned levels() const { return static_cast<unsigned>(levels_.size()); }
  const BinaryRS& level(unsigned l) const { return levels_[l]; }
  uint64_t zeros(unsigned l) const { return zeros_[l]; }
  const AlphabetMap& alphabet() const { return map_; }
  uint64_t bitmap_bits() const { return n_ * levels_.size(); }
  uint64_t structure_bytes() const;

  uint64_t access_code(uint64_t i) const;
  uint64_t rank_code(uint64_t c, uint64_t i) const;
  uint64_t select_code(uint64_t c, uint64_t j) const;
  uint64_t rank_le_code(uint64_t c, uint64_t i) const;

  uint64_t access(uint64_t i) const;
  uint64_t rank(uint64_t raw, uint64_t i) const;
  uint64_t select(uint64_t raw, uint64_t j) const;
  uint64_t rank_le(uint64_t raw, uint64_t i) const;

  void save(ByteWriter& out) const;
  static WaveletMatrix load(ByteReader& in);

  bool operator==(const WaveletMatrix& o) const {
    return n_ == o.n_ && tau_ == o.tau_ && map_ == o.map_ && levels_ == o.levels_ && zeros_ == o.zeros_;
  }

 private:
  uint64_t check_index(uint64_t i) const;
  // Ones strictly before position x.
  uint64_t ones_before(unsigned l, uint64_t x) const { return x == 0 ? 0 : levels_[l].rank1(x - 1); }

  uint64_t n_ = 0;
  unsigned tau_ = 1;
  AlphabetMap map_;
  std::vector<BinaryRS> levels_;
  std::vector<uint64_t> zeros_;
};

/// Matrix level bitmaps over dense codes of width h, tau-bit blocks: the first
/// level of a block by a stable sort on reversed bits, the rest by short lists.
std::vector<PackedBitVector> build_matrix_levels(CostMeter& meter, std::span<const uint64_t> codes, unsigned h,
                                                 unsigned tau);

}  // namespace wsds
