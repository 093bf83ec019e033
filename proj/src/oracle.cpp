#include "wsds/oracle.hpp"

#include <map>
#include <string>

#include "wsds/common.hpp"

namespace wsds::oracle {

uint64_t access(std::span<const uint64_t> s, uint64_t i) {
  if (i >= s.size()) throw IndexOutOfRange("index " + std::to_string(i) + " out of range");
  return s[i];
}

uint64_t rank(std::span<const uint64_t> s, uint64_t c, uint64_t i) {
  if (i >= s.size()) throw IndexOutOfRange("index " + std::to_string(i) + " out of range");
  uint64_t r = 0;
  for (uint64_t p = 0; p <= i; ++p) r += s[p] == c;
  return r;
}

uint64_t rank_le(std::span<const uint64_t> s, uint64_t c, uint64_t i) {
  if (i >= s.size()) throw IndexOutOfRange("index " + std::to_string(i) + " out of range");
  uint64_t r = 0;
  for (uint64_t p = 0; p <= i; ++p) r += s[p] <= c;
  return r;
}

uint64_t select(std::span<const uint64_t> s, uint64_t c, uint64_t j) {
  if (j == 0) throw OccurrenceOutOfRange("occurrence 0");
  uint64_t seen = 0;
  for (uint64_t p = 0; p < s.size(); ++p)
    if (s[p] == c && ++seen == j) return p;
  throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range");
}

Dense dense(std::span<const uint64_t> s) {
  std::map<uint64_t, uint64_t> m;
  for (uint64_t v : s) m[v] = 0;
  Dense d;
  for (auto& [v, code] : m) {
    code = d.symbols.size();
    d.symbols.push_back(v);
  }
  for (uint64_t v : s) d.codes.push_back(m[v]);
  return d;
}

namespace {

unsigned bits_for(uint64_t sigma) {
  unsigned h = 1;
  while ((uint64_t{1} << h) < sigma) ++h;
  return h;
}

void tree_rec(const std::vector<uint64_t>& elems, uint64_t lo, uint64_t hi, uint64_t id, bool root, NodeBits& out) {
  // codes in [lo, hi), hi - lo a power of two >= 2
  if (elems.empty() && !root) return;
  const uint64_t mid = lo + (hi - lo) / 2;
  Bits b;
  std::vector<uint64_t> left, right;
  for (uint64_t c : elems) {
    b.push_back(c >= mid);
    (c >= mid ? right : left).push_back(c);
  }
  out.emplace_back(id, b);
  if (hi - lo > 2) {
    tree_rec(left, lo, mid, 2 * id + 1, false, out);
    tree_rec(right, mid, hi, 2 * id + 2, false, out);
  }
}

void shaped_rec(const std::vector<uint64_t>& elems, unsigned depth, uint64_t id, const std::vector<uint64_t>& code,
                const std::vector<unsigned>& len, NodeBits& out) {
  std::vector<uint64_t> go;
  for (uint64_t c : elems)
    if (len[c] > depth) go.push_back(c);
  if (go.empty() && id != 0) return;
  // a node exists when some codeword continues below this prefix
  bool inner = false;
  for (uint64_t c = 0; c < code.size() && !inner; ++c) {
    if (len[c] <= depth) continue;
    uint64_t v = 0;  // heap id of c's prefix of length depth
    for (unsigned k = 0; k < depth; ++k) v = 2 * v + 1 + ((code[c] >> (len[c] - 1 - k)) & 1);
    inner = v == id;
  }
  if (!inner) return;
  Bits b;
  std::vector<uint64_t> left, right;
  for (uint64_t c : go) {
    const bool bit = (code[c] >> (len[c] - 1 - depth)) & 1;
    b.push_back(bit);
    (bit ? right : left).push_back(c);
  }
  out.emplace_back(id, b);
  shaped_rec(left, depth + 1, 2 * id + 1, code, len, out);
  shaped_rec(right, depth + 1, 2 * id + 2, code, len, out);
}

}  // namespace

NodeBits tree(std::span<const uint64_t> s) {
  Dense d = dense(s);
  NodeBits out;
  if (d.symbols.size() == 1) return out;
  tree_rec(d.codes, 0, uint64_t{1} << bits_for(d.symbols.size()), 0, true, out);
  std::sort(out.begin(), out.end());
  return out;
}

NodeBits shaped(std::span<const uint64_t> s, const std::vector<uint64_t>& code, const std::vector<unsigned>& len) {
  Dense d = dense(s);
  NodeBits out;
  shaped_rec(d.codes, 0, 0, code, len, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<uint64_t, std::vector<uint64_t>>> multiary(std::span<const uint64_t> s, unsigned d) {
  Dense dn = dense(s);
  std::vector<std::pair<uint64_t, std::vector<uint64_t>>> out;
  if (dn.symbols.size() == 1) return out;
  const unsigned h = bits_for(dn.symbols.size());
  unsigned logd = 0;
  while ((1u << logd) < d) ++logd;
  // digit boundaries from the most significant bit
  std::vector<std::pair<unsigned, unsigned>> digits;  // (shift, width)
  for (unsigned used = 0; used < h; used += logd) {
    const unsigned w = std::min(logd, h - used);
    digits.emplace_back(h - used - w, w);
  }
  std::map<uint64_t, std::vector<uint64_t>> nodes;
  nodes[0];
  for (uint64_t c : dn.codes) {
    uint64_t id = 0;
    for (auto [shift, w] : digits) {
      const uint64_t dg = (c >> shift) & ((uint64_t{1} << w) - 1);
      nodes[id].push_back(dg);
      id = id * d + 1 + dg;
    }
  }
  for (auto& kv : nodes) out.emplace_back(kv.first, kv.second);
  return out;
}

Matrix matrix(std::span<const uint64_t> s) {
  Dense d = dense(s);
  Matrix m;
  if (d.symbols.size() == 1) return m;
  const unsigned h = bits_for(d.symbols.size());
  std::vector<uint64_t> cur = d.codes;
  for (unsigned l = 0; l < h; ++l) {
    Bits b;
    std::vector<uint64_t> zero, one;
    for (uint64_t c : cur) {
      const bool bit = (c >> (h - 1 - l)) & 1;
      b.push_back(bit);
      (bit ? one : zero).push_back(c);
    }
    m.levels.push_back(b);
    m.zeros.push_back(zero.size());
    cur = zero;
    cur.insert(cur.end(), one.begin(), one.end());
  }
  return m;
}

namespace {

uint64_t best_cost(const std::vector<uint64_t>& f, std::vector<unsigned>& len, size_t k, uint64_t kraft_used,
                   unsigned max_len) {
  // kraft_used counts units of 2^-max_len
  if (k == f.size()) {
    uint64_t cost = 0;
    for (size_t i = 0; i < f.size(); ++i) cost += f[i] * len[i];
    return cost;
  }
  uint64_t best = ~uint64_t{0};
  for (unsigned l = 1; l <= max_len; ++l) {
    const uint64_t unit = uint64_t{1} << (max_len - l);
    if (kraft_used + unit > (uint64_t{1} << max_len)) continue;
    len[k] = l;
    best = std::min(best, best_cost(f, len, k + 1, kraft_used + unit, max_len));
  }
  return best;
}

}  // namespace

uint64_t optimal_code_cost(std::span<const uint64_t> freqs) {
  std::vector<uint64_t> f;
  for (uint64_t v : freqs)
    if (v > 0) f.push_back(v);
  if (f.empty()) throw ContractViolation("all frequencies are zero");
  if (f.size() == 1) return 0;
  std::sort(f.begin(), f.end());
  static std::map<std::vector<uint64_t>, uint64_t> memo;
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  std::vector<unsigned> len(f.size());
  const uint64_t c = best_cost(f, len, 0, 0, static_cast<unsigned>(f.size() - 1));
  memo[f] = c;
  return c;
}

}  // namespace wsds::oracle
