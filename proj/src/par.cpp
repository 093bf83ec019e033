#include "wsds/par.hpp"

#include <omp.h>

#include <atomic>
#include <string>

namespace wsds {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_num_threads(unsigned threads) {
  g_threads = std::max(1u, threads);
  omp_set_num_threads(static_cast<int>(g_threads.load()));
}

unsigned num_threads() { return g_threads; }

bool detail::may_fork() { return g_threads > 1 && !omp_in_parallel(); }

ScanResult<uint64_t> prefix_sum(CostMeter& meter, std::span<const uint64_t> in) {
  return prefix_sum<uint64_t>(meter, in, [](uint64_t a, uint64_t b) { return a + b; }, 0, 1);
}

size_t sort_block_count(size_t n, unsigned digit_bits) {
  constexpr size_t kBlockItems = 4096;
  constexpr size_t kCounterBudget = size_t{1} << 20;
  const size_t wanted = (n + kBlockItems - 1) / kBlockItems;
  const size_t cap = std::max<size_t>(1, kCounterBudget >> digit_bits);
  return std::clamp<size_t>(wanted, 1, cap);
}

namespace {

// One stable counting pass on bits [shift, shift + digit_bits) of the key.
std::vector<SortItem> counting_pass(CostMeter& meter, std::span<const SortItem> in, unsigned shift,
                                    unsigned digit_bits) {
  const size_t n = in.size();
  const size_t buckets = size_t{1} << digit_bits;
  const uint64_t mask = low_mask(digit_bits);
  const size_t blocks = sort_block_count(n, digit_bits);
  const size_t per_block = (n + blocks - 1) / blocks;

  // Key-major count matrix: counts[key * blocks + block].
  std::vector<uint64_t> counts(buckets * blocks, 0);
  parallel_for(meter, blocks, [&](size_t b, CostMeter& m) {
    const size_t lo = std::min(n, b * per_block);
    const size_t hi = std::min(n, lo + per_block);
    for (size_t i = lo; i < hi; ++i) ++counts[((in[i].key >> shift) & mask) * blocks + b];
    m.charge(2 * (hi - lo));  // key extract, counter bump
  });
  // Fresh count matrix per pass; charged as the scan over it.
  auto offsets = prefix_sum(meter, std::span<const uint64_t>(counts)).prefixes;

  std::vector<SortItem> out(n);
  parallel_for(meter, blocks, [&](size_t b, CostMeter& m) {
    const size_t lo = std::min(n, b * per_block);
    const size_t hi = std::min(n, lo + per_block);
    for (size_t i = lo; i < hi; ++i) {
      const uint64_t k = (in[i].key >> shift) & mask;
      out[offsets[k * blocks + b]++] = in[i];
    }
    m.charge(3 * (hi - lo));  // key extract, offset bump, write
  });
  return out;
}

}  // namespace

std::vector<SortItem> stable_sort_by_key(CostMeter& meter, std::span<const SortItem> items,
                                         unsigned key_bits) {
  if (key_bits > kWordBits) throw ContractViolation("stable_sort_by_key: key_bits exceeds word size");
  const uint64_t limit = low_mask(key_bits);
  for (const auto& it : items)
    if (it.key > limit)
      throw ContractViolation("stable_sort_by_key: key " + std::to_string(it.key) + " needs more than " +
                              std::to_string(key_bits) + " bits");
  if (items.empty()) return {};
  if (key_bits == 0) return {items.begin(), items.end()};

  constexpr unsigned kMaxDigit = 16;
  std::vector<SortItem> cur(items.begin(), items.end());
  for (unsigned shift = 0; shift < key_bits; shift += kMaxDigit) {
    const unsigned digit = std::min(kMaxDigit, key_bits - shift);
    cur = counting_pass(meter, cur, shift, digit);
  }
  return cur;
}

}  // namespace wsds
