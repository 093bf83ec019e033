#pragma once

// Shared lookup tables, built once per configuration and then read-only.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "wsds/bits.hpp"
#include "wsds/par.hpp"

namespace wsds {

/// Per kappa-bit block: popcount, and the position of the j'th set bit
/// (bit 0 of the block is position 0).
class WordTables {
 public:
  static constexpr uint8_t kNone = 0xFF;

  explicit WordTables(unsigned kappa);

  unsigned kappa() const { return kappa_; }
  unsigned popcount(uint64_t block) const { return popcount_[block]; }
  /// j is 1-based; kNone when the block has fewer than j ones.
  uint8_t select(uint64_t block, unsigned j) const { return select_[block * kappa_ + (j - 1)]; }

  /// Position of the j'th (1-based) set bit of word via kappa-block probes.
  /// Adds the number of probes to *probes. Requires popcount(word) >= j.
  unsigned select_in_word(uint64_t word, uint64_t j, uint64_t* probes) const;

  uint64_t bytes() const { return popcount_.size() + select_.size(); }
  const CostMeter& build_cost() const { return build_cost_; }

 private:
  unsigned kappa_;
  std::vector<uint8_t> popcount_;
  std::vector<uint8_t> select_;
  CostMeter build_cost_;
};

/// Per group of m = max(1, floor(kappa/b)) b-bit symbols (packed as in
/// PackedList): the count of each symbol and the index of its j'th occurrence.
class SymbolTables {
 public:
  static constexpr uint8_t kNone = 0xFF;

  SymbolTables(unsigned kappa, unsigned symbol_bits);

  unsigned symbol_bits() const { return bits_; }
  unsigned group_symbols() const { return m_; }
  unsigned alphabet() const { return sigma_; }

  unsigned count(uint64_t group, unsigned c) const { return counts_[group * sigma_ + c]; }
  /// j is 1-based.
  uint8_t select(uint64_t group, unsigned c, unsigned j) const {
    return select_[(group * sigma_ + c) * m_ + (j - 1)];
  }

  uint64_t bytes() const { return counts_.size() + select_.size(); }
  const CostMeter& build_cost() const { return build_cost_; }

 private:
  unsigned bits_;
  unsigned m_;
  unsigned sigma_;
  std::vector<uint8_t> counts_;
  std::vector<uint8_t> select_;
  CostMeter build_cost_;
};

/// Memoizing registry. Builders charge a table's construction cost each time
/// they acquire it so meters stay independent of cache state.
class TableRegistry {
 public:
  static TableRegistry& instance();

  std::shared_ptr<const WordTables> word(unsigned kappa);
  std::shared_ptr<const SymbolTables> symbol(unsigned kappa, unsigned symbol_bits);
  std::shared_ptr<const ShortlistTable> shortlist(unsigned tau, unsigned cap);

  uint64_t total_bytes() const;

 private:
  mutable std::mutex mu_;
  std::map<unsigned, std::shared_ptr<const WordTables>> word_;
  std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const SymbolTables>> symbol_;
  std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const ShortlistTable>> shortlist_;
};

/// Adds a table's construction cost to meter as a sequential step.
inline void charge_table(CostMeter& meter, const CostMeter& table_cost) {
  meter.work += table_cost.work;
  meter.span += table_cost.span;
}

}  // namespace wsds
