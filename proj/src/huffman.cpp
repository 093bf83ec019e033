#include <queue>
#include <string>

#include "wsds/var.hpp"

namespace wsds {

Codebook huffman_codebook(std::span<const uint64_t> freqs) {
  const uint64_t sigma = freqs.size();
  Codebook book;
  book.code.assign(sigma, 0);
  book.len.assign(sigma, 0);

  struct Item {
    uint64_t freq;
    uint64_t min_symbol;
    uint32_t node;
    bool operator>(const Item& o) const {
      return freq != o.freq ? freq > o.freq : min_symbol > o.min_symbol;
    }
  };
  std::vector<int64_t> parent;
  std::vector<uint64_t> leaf_node(sigma, 0);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (uint64_t c = 0; c < sigma; ++c) {
    if (freqs[c] == 0) continue;
    leaf_node[c] = parent.size();
    pq.push({freqs[c], c, static_cast<uint32_t>(parent.size())});
    parent.push_back(-1);
  }
  if (pq.empty()) throw ContractViolation("huffman_codebook: all frequencies are zero");
  while (pq.size() > 1) {
    const Item a = pq.top();
    pq.pop();
    const Item b = pq.top();
    pq.pop();
    const auto id = static_cast<uint32_t>(parent.size());
    parent.push_back(-1);
    parent[a.node] = id;
    parent[b.node] = id;
    pq.push({a.freq + b.freq, std::min(a.min_symbol, b.min_symbol), id});
  }

  std::vector<uint64_t> order;
  for (uint64_t c = 0; c < sigma; ++c) {
    if (freqs[c] == 0) continue;
    unsigned depth = 0;
    for (int64_t v = static_cast<int64_t>(leaf_node[c]); parent[v] >= 0; v = parent[v]) ++depth;
    if (depth > kMaxCodeLength)
      throw ContractViolation("huffman_codebook: code length " + std::to_string(depth) + " exceeds 57 bits");
    book.len[c] = depth;
    order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](uint64_t a, uint64_t b) { return book.len[a] < book.len[b]; });
  uint64_t code = 0;
  unsigned prev = order.empty() ? 0 : book.len[order[0]];
  for (uint64_t c : order) {
    code <<= (book.len[c] - prev);
    prev = book.len[c];
    book.code[c] = code++;
  }
  return book;
}

uint64_t code_cost(const Codebook& book, std::span<const uint64_t> freqs) {
  uint64_t cost = 0;
  for (uint64_t c = 0; c < freqs.size(); ++c) cost += freqs[c] * book.len[c];
  return cost;
}

}  // namespace wsds
