#include <map>
#include <set>

#include "wsds/tables.hpp"
#include "wsds/wt.hpp"

namespace wsds {

namespace {

// Short-list tables used by one builder run; each is charged once per run.
class TableSet {
 public:
  TableSet(unsigned kappa, bool charge) : kappa_(kappa), charge_(charge) {}

  const ShortlistTable& get(CostMeter& meter, unsigned t) {
    auto& slot = tables_[t];
    if (!slot) {
      slot = TableRegistry::instance().shortlist(t, shortlist_cap(kappa_, t));
      if (charge_) charge_table(meter, slot->build_cost());
    }
    return *slot;
  }

 private:
  unsigned kappa_;
  bool charge_;
  std::map<unsigned, std::shared_ptr<const ShortlistTable>> tables_;
};

bool keep_node(const CodeShape& shape, unsigned level, uint64_t prefix, uint64_t count) {
  return shape.internal(level, prefix) && (count > 0 || level == 0);
}

// ---- naive: one bit per element per level

void naive_node(CostMeter& meter, const CodeShape& shape, unsigned level, uint64_t prefix,
                std::vector<uint64_t> elems, NodeBitmaps& out) {
  if (!keep_node(shape, level, prefix, elems.size())) return;
  const unsigned shift = shape.height() - 1 - level;
  PackedBitVector bm;
  std::vector<uint64_t> left, right;
  for (uint64_t a : elems) {
    const bool bit = (a >> shift) & 1;
    bm.push_back(bit);
    (bit ? right : left).push_back(a);
  }
  meter.charge(4 * elems.size());
  out.emplace_back(heap_id(level, prefix), std::move(bm));
  elems = {};
  naive_node(meter, shape, level + 1, 2 * prefix, std::move(left), out);
  naive_node(meter, shape, level + 1, 2 * prefix + 1, std::move(right), out);
}

// ---- packed serial

struct PackedCtx {
  CostMeter& meter;
  const CodeShape& shape;
  unsigned tau;
  TableSet& tables;
  NodeBitmaps& out;
};

// Node (base + s, q) over a short list of t-bit fields.
void packed_short(PackedCtx& ctx, const ShortlistTable& table, unsigned base, unsigned s, uint64_t q,
                  const PackedList& list) {
  const unsigned level = base + s;
  if (!keep_node(ctx.shape, level, q, list.size())) return;
  const unsigned t = table.tau();
  const unsigned cap = table.cap();
  const bool last = s + 1 == t;
  BitBuffer bm;
  PackedList lo(t), hi(t);
  uint64_t ops = 0;
  const uint64_t N = list.size();
  for (uint64_t start = 0; start < N; start += cap) {
    const unsigned len = static_cast<unsigned>(std::min<uint64_t>(cap, N - start));
    const auto& e = table.lookup(list.bits().extract(start * t, len * t), len, s);
    ops += 2 + 1 + bm.append_bits(e.bitmap, len);
    if (!last) {
      ops += lo.append_raw(e.lo, e.lo_count);
      ops += hi.append_raw(e.hi, e.hi_count);
    }
  }
  ctx.meter.charge(ops);
  ctx.out.emplace_back(heap_id(level, q), PackedBitVector(std::move(bm)));
  if (last) return;
  packed_short(ctx, table, base, s + 1, 2 * q, lo);
  packed_short(ctx, table, base, s + 1, 2 * q + 1, hi);
}

void packed_big(PackedCtx& ctx, unsigned base, uint64_t prefix, std::vector<uint64_t> codes) {
  if (!keep_node(ctx.shape, base, prefix, codes.size())) return;
  const unsigned h = ctx.shape.height();
  const unsigned t = std::min(ctx.tau, h - base);
  const ShortlistTable& table = ctx.tables.get(ctx.meter, t);
  const unsigned shift = h - base - t;
  const uint64_t mask = low_mask(t);

  PackedList list(t);
  uint64_t ops = 0;
  for (uint64_t a : codes) ops += 1 + list.append_raw((a >> shift) & mask, 1);
  ctx.meter.charge(ops);
  packed_short(ctx, table, base, 0, prefix, list);
  list = PackedList(t);
  if (base + t >= h) return;

  // Stable distribution into the big children.
  const uint64_t buckets = uint64_t{1} << t;
  std::vector<uint64_t> start(buckets + 1, 0);
  for (uint64_t a : codes) ++start[((a >> shift) & mask) + 1];
  for (uint64_t k = 0; k < buckets; ++k) start[k + 1] += start[k];
  std::vector<uint64_t> sorted(codes.size());
  {
    std::vector<uint64_t> pos(start.begin(), start.end() - 1);
    for (uint64_t a : codes) sorted[pos[(a >> shift) & mask]++] = a;
  }
  ctx.meter.charge(4 * codes.size() + buckets);
  codes = {};
  for (uint64_t k = 0; k < buckets; ++k) {
    if (start[k] == start[k + 1]) continue;
    const uint64_t child = (prefix << t) | k;
    if (!ctx.shape.internal(base + t, child)) continue;
    packed_big(ctx, base + t, child, std::vector<uint64_t>(sorted.begin() + start[k], sorted.begin() + start[k + 1]));
  }
}

NodeBitmaps packed_impl(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape, unsigned tau,
                        unsigned kappa, bool charge_tables) {
  NodeBitmaps out;
  TableSet tables(kappa, charge_tables);
  PackedCtx ctx{meter, shape, tau, tables, out};
  packed_big(ctx, 0, 0, std::vector<uint64_t>(aligned.begin(), aligned.end()));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

// ---- parallel pieces

struct Piece {
  uint64_t value = 0;
  unsigned len = 0;  // <= 64
};

// Concatenates pieces in order: prefix sum of lengths, compaction of the
// nonempty pieces, then each output word is merged from the piece covering
// its first bit onward.
BitBuffer concat_pieces(CostMeter& meter, std::span<const Piece> pieces) {
  const size_t P = pieces.size();
  std::vector<uint64_t> lens(P), nonempty(P);
  parallel_for(meter, P, [&](size_t i, CostMeter& m) {
    lens[i] = pieces[i].len;
    nonempty[i] = pieces[i].len > 0;
    m.charge(1);
  });
  auto off = prefix_sum(meter, std::span<const uint64_t>(lens));
  auto idx = prefix_sum(meter, std::span<const uint64_t>(nonempty));
  std::vector<uint64_t> keep(idx.total);
  parallel_for(meter, P, [&](size_t i, CostMeter& m) {
    if (nonempty[i]) keep[idx.prefixes[i]] = i;
    m.charge(1);
  });
  const uint64_t total = off.total;
  const uint64_t W = words_for_bits(total);
  std::vector<uint64_t> first(W, 0);
  parallel_for(meter, keep.size(), [&](size_t j, CostMeter& m) {
    const uint64_t o = off.prefixes[keep[j]];
    const uint64_t e = o + pieces[keep[j]].len;
    // the word whose first bit lies in [o, e)
    const uint64_t w = (o + 63) / 64;
    if (w * 64 < e) first[w] = j;
    m.charge(1);
  });
  std::vector<uint64_t> words(W, 0);
  parallel_for(meter, W, [&](size_t w, CostMeter& m) {
    uint64_t acc = 0;
    uint64_t ops = 1;
    for (size_t j = first[w]; j < keep.size(); ++j) {
      const uint64_t o = off.prefixes[keep[j]];
      if (o >= 64 * (w + 1)) break;
      const uint64_t v = pieces[keep[j]].value & low_mask(pieces[keep[j]].len);
      if (o >= 64 * w) acc |= v << (o - 64 * w);
      else acc |= v >> (64 * w - o);
      ++ops;
    }
    words[w] = acc;
    m.charge(ops);
  });
  return BitBuffer::from_words(std::move(words), total);
}

}  // namespace

// One short-list node: chunk, probe in parallel, then assemble the three outputs.
ShortlistSplit split_shortlist(CostMeter& meter, const ShortlistTable& table, unsigned s, const PackedList& list, bool last) {
  const unsigned t = table.tau();
  const unsigned cap = table.cap();
  const uint64_t N = list.size();
  const uint64_t C = (N + cap - 1) / cap;
  std::vector<Piece> bm(C), lo(last ? 0 : C), hi(last ? 0 : C);
  parallel_for(meter, C, [&](size_t k, CostMeter& m) {
    const uint64_t start = k * cap;
    const unsigned len = static_cast<unsigned>(std::min<uint64_t>(cap, N - start));
    const auto& e = table.lookup(list.bits().extract(start * t, len * t), len, s);
    bm[k] = {e.bitmap, len};
    if (!last) {
      lo[k] = {e.lo, e.lo_count * t};
      hi[k] = {e.hi, e.hi_count * t};
    }
    m.charge(2);
  });
  ShortlistSplit out;
  BitBuffer a, b, c;
  par_do(
      meter, [&](CostMeter& m) { a = concat_pieces(m, bm); },
      [&](CostMeter& m) {
        if (last) return;
        par_do(
            m, [&](CostMeter& m2) { b = concat_pieces(m2, lo); }, [&](CostMeter& m2) { c = concat_pieces(m2, hi); });
      });
  out.bitmap = PackedBitVector(std::move(a));
  if (!last) {
    const uint64_t nlo = b.size_bits() / t;
    const uint64_t nhi = c.size_bits() / t;
    out.lo = PackedList::from_buffer(std::move(b), nlo, t);
    out.hi = PackedList::from_buffer(std::move(c), nhi, t);
  }
  return out;
}

namespace {

struct BigNode {
  uint64_t prefix = 0;
  std::vector<uint64_t> codes;
};

struct BigResult {
  NodeBitmaps bitmaps;
  std::vector<BigNode> children;
};

BigResult sorted_big(CostMeter& meter, const CodeShape& shape, const ShortlistTable& table, unsigned base,
                     const BigNode& big) {
  BigResult res;
  const unsigned h = shape.height();
  const unsigned t = table.tau();
  const unsigned shift = h - base - t;
  const uint64_t mask = low_mask(t);
  const auto& codes = big.codes;
  const uint64_t N = codes.size();

  // Short lists level by level below the big node.
  struct Item {
    uint64_t q;
    PackedList list;
  };
  std::vector<Item> cur;
  cur.push_back({big.prefix, pack_parallel(meter, N, t, [&](uint64_t i) { return (codes[i] >> shift) & mask; })});
  for (unsigned s = 0; s < t; ++s) {
    const bool last = s + 1 == t;
    std::vector<ShortlistSplit> outs(cur.size());
    std::vector<char> kept(cur.size(), 0);
    parallel_for(meter, cur.size(), [&](size_t k, CostMeter& m) {
      if (!keep_node(shape, base + s, cur[k].q, cur[k].list.size())) return;
      kept[k] = 1;
      outs[k] = split_shortlist(m, table, s, cur[k].list, last);
    });
    std::vector<Item> next;
    for (size_t k = 0; k < cur.size(); ++k) {
      if (!kept[k]) continue;
      res.bitmaps.emplace_back(heap_id(base + s, cur[k].q), std::move(outs[k].bitmap));
      if (!last) {
        next.push_back({2 * cur[k].q, std::move(outs[k].lo)});
        next.push_back({2 * cur[k].q + 1, std::move(outs[k].hi)});
      }
    }
    cur = std::move(next);
  }
  if (base + t >= h) return res;

  // Big children by a stable sort on the t-bit slice.
  std::vector<SortItem> items(N);
  parallel_for(meter, (N + 4095) / 4096, [&](size_t b, CostMeter& m) {
    const uint64_t lo = b * 4096, hi = std::min<uint64_t>(N, lo + 4096);
    for (uint64_t i = lo; i < hi; ++i) items[i] = {(codes[i] >> shift) & mask, codes[i]};
    m.charge(2 * (hi - lo));
  });
  std::vector<SortItem> sorted = stable_sort_by_key(meter, items, t);
  const uint64_t buckets = uint64_t{1} << t;
  std::vector<uint64_t> start(buckets + 1, N);
  parallel_for(meter, (N + 4095) / 4096, [&](size_t b, CostMeter& m) {
    const uint64_t lo = b * 4096, hi = std::min<uint64_t>(N, lo + 4096);
    for (uint64_t i = lo; i < hi; ++i)
      if (i == 0 || sorted[i].key != sorted[i - 1].key) start[sorted[i].key] = i;
    m.charge(hi - lo);
  });
  for (uint64_t k = buckets; k-- > 0;) start[k] = std::min(start[k], start[k + 1]);
  meter.charge(buckets);
  std::vector<int64_t> slot(buckets, -1);
  for (uint64_t k = 0; k < buckets; ++k) {
    const uint64_t child = (big.prefix << t) | k;
    if (start[k] == start[k + 1] || !shape.internal(base + t, child)) continue;
    slot[k] = static_cast<int64_t>(res.children.size());
    res.children.push_back({child, std::vector<uint64_t>(start[k + 1] - start[k])});
  }
  parallel_for(meter, (N + 4095) / 4096, [&](size_t b, CostMeter& m) {
    const uint64_t lo = b * 4096, hi = std::min<uint64_t>(N, lo + 4096);
    for (uint64_t i = lo; i < hi; ++i) {
      const uint64_t k = sorted[i].key;
      if (slot[k] >= 0) res.children[slot[k]].codes[i - start[k]] = sorted[i].payload;
    }
    m.charge(2 * (hi - lo));
  });
  return res;
}

void sort_by_id(NodeBitmaps& bm) {
  std::sort(bm.begin(), bm.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

}  // namespace

NodeBitmaps build_bitmaps_naive(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape) {
  NodeBitmaps out;
  naive_node(meter, shape, 0, 0, std::vector<uint64_t>(aligned.begin(), aligned.end()), out);
  sort_by_id(out);
  return out;
}

NodeBitmaps build_bitmaps_packed(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape,
                                 unsigned tau) {
  return packed_impl(meter, aligned, shape, tau, SizeParams::for_length(aligned.size()).kappa, true);
}

NodeBitmaps build_bitmaps_sorted(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape,
                                 unsigned tau) {
  NodeBitmaps out;
  TableSet tables(SizeParams::for_length(aligned.size()).kappa, true);
  const unsigned h = shape.height();
  std::vector<BigNode> level;
  if (keep_node(shape, 0, 0, aligned.size())) level.push_back({0, {aligned.begin(), aligned.end()}});
  for (unsigned base = 0; !level.empty() && base < h;) {
    const unsigned t = std::min(tau, h - base);
    const ShortlistTable& table = tables.get(meter, t);
    std::vector<BigResult> res(level.size());
    parallel_for(meter, level.size(),
                 [&](size_t k, CostMeter& m) { res[k] = sorted_big(m, shape, table, base, level[k]); });
    std::vector<BigNode> next;
    for (auto& r : res) {
      for (auto& b : r.bitmaps) out.push_back(std::move(b));
      for (auto& c : r.children) next.push_back(std::move(c));
    }
    level = std::move(next);
    base += t;
  }
  sort_by_id(out);
  return out;
}

PackedBitVector concat_bitvectors(CostMeter& meter, std::span<const PackedBitVector* const> parts) {
  const size_t P = parts.size();
  std::vector<uint64_t> lens(P);
  parallel_for(meter, P, [&](size_t k, CostMeter& m) {
    lens[k] = parts[k] ? parts[k]->size() : 0;
    m.charge(1);
  });
  auto off = prefix_sum(meter, std::span<const uint64_t>(lens));
  const uint64_t total = off.total;
  std::vector<uint64_t> words(words_for_bits(total), 0);

  // Words lying entirely inside one part are copied by that part.
  parallel_for(meter, P, [&](size_t k, CostMeter& m) {
    const uint64_t o = off.prefixes[k];
    const uint64_t e = o + lens[k];
    uint64_t ops = 1;
    for (uint64_t w = (o + 63) / 64; 64 * w + 64 <= e; ++w) {
      words[w] = parts[k]->extract(64 * w - o, 64);
      ++ops;
    }
    m.charge(ops);
  });

  // Boundary words: fragments of several parts, folded by binary fan-in.
  std::vector<uint64_t> boundary;
  for (size_t k = 0; k < P; ++k) {
    if (lens[k] == 0) continue;
    const uint64_t o = off.prefixes[k];
    const uint64_t e = o + lens[k];
    for (uint64_t w : {o / 64, (e - 1) / 64}) {
      const bool owned = 64 * w >= o && 64 * w + 64 <= e;
      if (!owned && (boundary.empty() || boundary.back() != w)) boundary.push_back(w);
    }
  }
  meter.charge(boundary.size() + P);
  parallel_for(meter, boundary.size(), [&](size_t bi, CostMeter& m) {
    const uint64_t w = boundary[bi];
    const uint64_t wlo = 64 * w, whi = std::min(64 * w + 64, total);
    // first part with bits in the word
    size_t k = std::upper_bound(off.prefixes.begin(), off.prefixes.end(), wlo) - off.prefixes.begin() - 1;
    std::vector<uint64_t> frags;
    for (; k < P && off.prefixes[k] < whi; ++k) {
      if (lens[k] == 0) continue;
      const uint64_t a = std::max(wlo, off.prefixes[k]);
      const uint64_t b = std::min(whi, off.prefixes[k] + lens[k]);
      if (a >= b) continue;
      frags.push_back(parts[k]->extract(a - off.prefixes[k], static_cast<unsigned>(b - a)) << (a - wlo));
    }
    uint64_t span = 0;
    while (frags.size() > 1) {
      std::vector<uint64_t> up((frags.size() + 1) / 2, 0);
      for (size_t i = 0; i < frags.size(); ++i) up[i / 2] |= frags[i];
      frags = std::move(up);
      ++span;
    }
    words[w] = frags.empty() ? 0 : frags[0];
    m.work += 2 * (whi - wlo > 0 ? 1 : 0) + frags.size() + 2 * span + ceil_log2(P);
    m.span += 2 + span + ceil_log2(P);
  });
  return PackedBitVector(BitBuffer::from_words(std::move(words), total));
}

NodeBitmaps build_bitmaps_domain(CostMeter& meter, std::span<const uint64_t> aligned, const CodeShape& shape,
                                 unsigned tau, uint64_t parts) {
  if (parts == 0) throw ContractViolation("domain decomposition needs at least one part");
  const uint64_t n = aligned.size();
  const uint64_t P = std::max<uint64_t>(1, std::min(parts, n));
  const unsigned kappa = SizeParams::for_length(n).kappa;
  if (P == 1) return packed_impl(meter, aligned, shape, tau, kappa, true);

  {
    TableSet tables(kappa, true);
    for (unsigned base = 0; base < shape.height(); base += tau) tables.get(meter, std::min(tau, shape.height() - base));
  }
  const uint64_t q = n / P, r = n % P;
  std::vector<NodeBitmaps> part(P);
  parallel_for(meter, P, [&](size_t k, CostMeter& m) {
    const uint64_t lo = k * q + std::min<uint64_t>(k, r);
    const uint64_t len = q + (k < r ? 1 : 0);
    part[k] = packed_impl(m, aligned.subspan(lo, len), shape, tau, kappa, false);
  });

  std::vector<uint64_t> ids;
  for (const auto& p : part)
    for (const auto& [id, bv] : p) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  meter.charge(ids.size());

  NodeBitmaps out(ids.size());
  parallel_for(meter, ids.size(), [&](size_t i, CostMeter& m) {
    std::vector<const PackedBitVector*> src(P, nullptr);
    for (uint64_t k = 0; k < P; ++k) {
      auto it = std::lower_bound(part[k].begin(), part[k].end(), ids[i],
                                 [](const auto& e, uint64_t id) { return e.first < id; });
      if (it != part[k].end() && it->first == ids[i]) src[k] = &it->second;
    }
    m.charge(P * (1 + ceil_log2(part[0].size() + 1)));
    out[i] = {ids[i], concat_bitvectors(m, src)};
  });
  return out;
}

}  // namespace wsds
