#pragma once

// Fork-join primitives with work/span accounting.
//
// Every primitive takes the caller's CostMeter. Bodies of a parallel_for get a
// fresh meter each; at the join the parent adds the sum of child work and the
// max of child span (plus the log-depth fork tree). Meter values depend only on
// the logical fork tree, never on how many OS threads executed it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wsds/common.hpp"

namespace wsds {

struct CostMeter {
  uint64_t work = 0;
  uint64_t span = 0;

  /// Sequential cost: ops on the current strand.
  void charge(uint64_t ops) {
    work += ops;
    span += ops;
  }

  /// Join of independent children run in parallel after this strand.
  void join(uint64_t child_work, uint64_t child_span_max, uint64_t fork_depth) {
    work += child_work;
    span += child_span_max + fork_depth;
  }

  bool operator==(const CostMeter&) const = default;
};

void set_num_threads(unsigned threads);
unsigned num_threads();

namespace detail {
// Below this many iterations a parallel_for runs inline on the calling thread.
inline constexpr size_t kInlineCutoff = 512;
bool may_fork();
}  // namespace detail

/// Runs body(i, meter) for i in [0, n). Bodies must write disjoint outputs.
template <class Body>
void parallel_for(CostMeter& meter, size_t n, Body&& body) {
  if (n == 0) return;
  uint64_t work = 0;
  uint64_t span = 0;
  if (n < detail::kInlineCutoff || !detail::may_fork()) {
    for (size_t i = 0; i < n; ++i) {
      CostMeter local;
      body(i, local);
      work += local.work;
      span = std::max(span, local.span);
    }
  } else {
#pragma omp parallel for schedule(static) reduction(+ : work) reduction(max : span)
    for (size_t i = 0; i < n; ++i) {
      CostMeter local;
      body(i, local);
      work += local.work;
      span = std::max(span, local.span);
    }
  }
  meter.join(work, span, ceil_log2(n));
}

/// Binary fork: left and right are logically parallel.
template <class Left, class Right>
void par_do(CostMeter& meter, Left&& left, Right&& right) {
  CostMeter a;
  CostMeter b;
  left(a);
  right(b);
  meter.join(a.work + b.work, std::max(a.span, b.span), 1);
}

template <class T>
struct ScanResult {
  std::vector<T> prefixes;  // exclusive: prefixes[i] = identity (+) X[0] (+) ... (+) X[i-1]
  T total;
};

namespace detail {

template <class T, class Op>
ScanResult<T> scan_contract(CostMeter& meter, std::span<const T> in, const Op& op, const T& identity,
                            uint64_t op_cost) {
  const size_t n = in.size();
  if (n == 0) return {{}, identity};
  if (n == 1) {
    meter.charge(op_cost);
    return {{identity}, op(identity, in[0])};
  }
  const size_t half = (n + 1) / 2;
  std::vector<T> pairs(half, identity);
  parallel_for(meter, half, [&](size_t i, CostMeter& m) {
    if (2 * i + 1 < n) {
      pairs[i] = op(in[2 * i], in[2 * i + 1]);
      m.charge(op_cost);
    } else {
      pairs[i] = in[2 * i];
      m.charge(1);
    }
  });
  ScanResult<T> inner = scan_contract<T, Op>(meter, std::span<const T>(pairs), op, identity, op_cost);
  std::vector<T> out(n, identity);
  parallel_for(meter, half, [&](size_t i, CostMeter& m) {
    out[2 * i] = inner.prefixes[i];
    if (2 * i + 1 < n) {
      out[2 * i + 1] = op(inner.prefixes[i], in[2 * i]);
      m.charge(op_cost + 1);
    } else {
      m.charge(1);
    }
  });
  return {std::move(out), std::move(inner.total)};
}

}  // namespace detail

/// Exclusive prefix sum under an associative op. The result equals the serial
/// left fold element-for-element; op need not be commutative. op_cost is the
/// number of word ops one application of op is charged.
template <class T, class Op>
ScanResult<T> prefix_sum(CostMeter& meter, std::span<const T> in, const Op& op, const T& identity,
                         uint64_t op_cost = 1) {
  return detail::scan_contract<T, Op>(meter, in, op, identity, op_cost);
}

/// Integer addition scan, the common case.
ScanResult<uint64_t> prefix_sum(CostMeter& meter, std::span<const uint64_t> in);

struct SortItem {
  uint64_t key = 0;
  uint64_t payload = 0;
  bool operator==(const SortItem&) const = default;
};

/// Stable sort by key, all keys < 2^key_bits. Block-parallel counting sort
/// (LSD passes of at most 16 key bits when key_bits > 16).
std::vector<SortItem> stable_sort_by_key(CostMeter& meter, std::span<const SortItem> items,
                                         unsigned key_bits);

/// Block count used by the counting sort for n items and 2^digit_bits buckets.
size_t sort_block_count(size_t n, unsigned digit_bits);

}  // namespace wsds
