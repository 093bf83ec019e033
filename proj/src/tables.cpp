#include "wsds/tables.hpp"

#include <bit>

namespace wsds {

WordTables::WordTables(unsigned kappa) : kappa_(kappa) {
  if (kappa < 1 || kappa > 16) throw ContractViolation("WordTables: kappa must be in [1, 16]");
  const uint64_t blocks = uint64_t{1} << kappa;
  popcount_.resize(blocks);
  select_.assign(blocks * kappa, kNone);
  parallel_for(build_cost_, blocks, [&](size_t b, CostMeter& m) {
    unsigned seen = 0;
    for (unsigned i = 0; i < kappa; ++i) {
      if ((b >> i) & 1) select_[b * kappa + seen++] = static_cast<uint8_t>(i);
    }
    popcount_[b] = static_cast<uint8_t>(seen);
    m.charge(kappa);
  });
}

unsigned WordTables::select_in_word(uint64_t word, uint64_t j, uint64_t* probes) const {
  unsigned base = 0;
  const uint64_t mask = low_mask(kappa_);
  while (base < 64) {
    const uint64_t block = (word >> base) & mask;
    const unsigned c = popcount_[block];
    ++*probes;
    if (j <= c) return base + select(block, static_cast<unsigned>(j));
    j -= c;
    base += kappa_;
  }
  throw ContractViolation("WordTables::select_in_word: word has fewer ones than requested");
}

SymbolTables::SymbolTables(unsigned kappa, unsigned symbol_bits) : bits_(symbol_bits) {
  if (symbol_bits < 1 || symbol_bits > 4) throw ContractViolation("SymbolTables: symbol width must be in [1, 4]");
  m_ = std::max(1u, kappa / symbol_bits);
  sigma_ = 1u << symbol_bits;
  const uint64_t groups = uint64_t{1} << (m_ * bits_);
  counts_.assign(groups * sigma_, 0);
  select_.assign(groups * sigma_ * m_, kNone);
  parallel_for(build_cost_, groups, [&](size_t g, CostMeter& m) {
    for (unsigned i = 0; i < m_; ++i) {
      const unsigned c = (g >> (i * bits_)) & low_mask(bits_);
      const unsigned k = counts_[g * sigma_ + c]++;
      select_[(g * sigma_ + c) * m_ + k] = static_cast<uint8_t>(i);
    }
    m.charge(2 * m_);
  });
}

TableRegistry& TableRegistry::instance() {
  static TableRegistry registry;
  return registry;
}

std::shared_ptr<const WordTables> TableRegistry::word(unsigned kappa) {
  std::lock_guard lock(mu_);
  auto& slot = word_[kappa];
  if (!slot) slot = std::make_shared<const WordTables>(kappa);
  return slot;
}

std::shared_ptr<const SymbolTables> TableRegistry::symbol(unsigned kappa, unsigned symbol_bits) {
  std::lock_guard lock(mu_);
  auto& slot = symbol_[{kappa, symbol_bits}];
  if (!slot) slot = std::make_shared<const SymbolTables>(kappa, symbol_bits);
  return slot;
}

std::shared_ptr<const ShortlistTable> TableRegistry::shortlist(unsigned tau, unsigned cap) {
  std::lock_guard lock(mu_);
  auto& slot = shortlist_[{tau, cap}];
  if (!slot) slot = std::make_shared<const ShortlistTable>(tau, cap);
  return slot;
}

uint64_t TableRegistry::total_bytes() const {
  std::lock_guard lock(mu_);
  uint64_t total = 0;
  for (const auto& [k, t] : word_) total += t->bytes();
  for (const auto& [k, t] : symbol_) total += t->bytes();
  for (const auto& [k, t] : shortlist_) total += t->bytes();
  return total;
}

}  // namespace wsds
