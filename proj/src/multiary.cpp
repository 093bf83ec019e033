#include <map>
#include <string>

#include "wsds/tables.hpp"
#include "wsds/var.hpp"

namespace wsds {

namespace {

enum : uint8_t { kTagAlphabet = 1, kTagPresence = 3, kTagNode = 4 };

struct Group {
  uint64_t id = 0;
  std::vector<uint64_t> codes;
};

// Number of d-ary heap ids on levels [0, levels).
uint64_t id_count(unsigned d, unsigned levels) {
  uint64_t total = 0, width = 1;
  for (unsigned b = 0; b < levels; ++b) {
    total += width;
    width *= d;
  }
  return total;
}

}  // namespace

void MultiaryTree::init_shape(uint64_t n, unsigned degree) {
  if (degree < 2 || degree > 16 || (degree & (degree - 1)) != 0)
    throw ContractViolation("multiary tree: degree " + std::to_string(degree) + " is not a power of two in [2, 16]");
  n_ = n;
  d_ = degree;
  logd_ = static_cast<unsigned>(std::countr_zero(degree));
  h_ = ceil_log2(std::max<uint64_t>(map_.size(), 2));
  levels_ = (h_ + logd_ - 1) / logd_;
  has_root_ = map_.size() != 1;
}

unsigned MultiaryTree::digit_bits(unsigned beta) const { return std::min(logd_, h_ - beta * logd_); }

uint64_t MultiaryTree::digit(uint64_t c, unsigned beta) const {
  const unsigned w = digit_bits(beta);
  return (c >> (h_ - beta * logd_ - w)) & low_mask(w);
}

MultiaryTree MultiaryTree::build(CostMeter& meter, std::span<const uint64_t> raw, unsigned degree, unsigned tau) {
  MultiaryTree t;
  MappedSequence ms = map_alphabet(raw);
  t.map_ = std::move(ms.map);
  t.init_shape(raw.size(), degree);
  t.tau_ = resolve_tau(tau, raw.size(), t.h_);
  std::vector<uint64_t> codes = aligned_codes(meter, ms.codes, CodeShape::balanced(t.map_.size()));

  std::vector<std::pair<uint64_t, PackedList>> seqs;
  std::vector<Group> level;
  if (t.has_root_) level.push_back({0, std::move(codes)});
  for (unsigned beta = 0; beta < t.levels_ && !level.empty(); ++beta) {
    const unsigned w = t.digit_bits(beta);
    const unsigned shift = t.h_ - beta * t.logd_ - w;
    const uint64_t mask = low_mask(w);
    const bool last = beta + 1 == t.levels_;
    std::vector<PackedList> digits(level.size());
    std::vector<std::vector<Group>> kids(level.size());
    parallel_for(meter, level.size(), [&](size_t g, CostMeter& m) {
      const auto& cs = level[g].codes;
      const uint64_t N = cs.size();
      digits[g] = pack_parallel(m, N, w, [&](uint64_t i) { return (cs[i] >> shift) & mask; });
      if (last) return;
      std::vector<SortItem> items(N);
      parallel_for(m, (N + 4095) / 4096, [&](size_t b, CostMeter& mm) {
        const uint64_t lo = b * 4096, hi = std::min<uint64_t>(N, lo + 4096);
        for (uint64_t i = lo; i < hi; ++i) items[i] = {(cs[i] >> shift) & mask, cs[i]};
        mm.charge(2 * (hi - lo));
      });
      auto sorted = stable_sort_by_key(m, items, w);
      std::vector<uint64_t> start(t.d_ + 1, N);
      for (uint64_t i = 0; i < N; ++i)
        if (i == 0 || sorted[i].key != sorted[i - 1].key) start[sorted[i].key] = i;
      for (uint64_t k = t.d_; k-- > 0;) start[k] = std::min(start[k], start[k + 1]);
      m.charge(N + t.d_);
      for (uint64_t k = 0; k <= mask; ++k) {
        if (start[k] == start[k + 1]) continue;
        Group ch{t.child(level[g].id, k), std::vector<uint64_t>(start[k + 1] - start[k])};
        for (uint64_t i = start[k]; i < start[k + 1]; ++i) ch.codes[i - start[k]] = sorted[i].payload;
        kids[g].push_back(std::move(ch));
      }
    });
    std::vector<Group> next;
    for (size_t g = 0; g < level.size(); ++g) {
      seqs.emplace_back(level[g].id, std::move(digits[g]));
      for (auto& k : kids[g]) next.push_back(std::move(k));
    }
    level = std::move(next);
  }
  std::sort(seqs.begin(), seqs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const SizeParams p = SizeParams::for_length(t.n_);
  auto& reg = TableRegistry::instance();
  auto words = reg.word(p.kappa);
  charge_table(meter, words->build_cost());
  std::map<unsigned, std::shared_ptr<const SymbolTables>> symbols;
  for (unsigned beta = 0; beta < t.levels_; ++beta) {
    auto& slot = symbols[t.digit_bits(beta)];
    if (!slot) {
      slot = reg.symbol(p.kappa, t.digit_bits(beta));
      charge_table(meter, slot->build_cost());
    }
  }
  t.nodes_.resize(seqs.size());
  parallel_for(meter, seqs.size(), [&](size_t k, CostMeter& m) {
    const unsigned w = seqs[k].second.width();
    t.nodes_[k].id = seqs[k].first;
    t.nodes_[k].rs = GeneralRS::build(m, std::move(seqs[k].second), 1u << w, p, words, symbols.at(w));
  });
  t.index_nodes();
  return t;
}

void MultiaryTree::index_nodes() {
  slot_.clear();
  for (uint32_t k = 0; k < nodes_.size(); ++k) slot_[nodes_[k].id] = k;
}

const MultiaryTree::Node* MultiaryTree::node(uint64_t id) const {
  auto it = slot_.find(id);
  return it == slot_.end() ? nullptr : &nodes_[it->second];
}

uint64_t MultiaryTree::digit_bits_total() const {
  uint64_t b = 0;
  for (const auto& nd : nodes_) b += nd.rs.size() * nd.rs.seq().width();
  return b;
}

uint64_t MultiaryTree::structure_bytes() const {
  uint64_t b = map_.size() * 8;
  for (const auto& nd : nodes_) b += nd.rs.seq().words().size() * 8 + nd.rs.overhead_bytes();
  return b;
}

uint64_t MultiaryTree::check_index(uint64_t i) const {
  if (i >= n_)
    throw IndexOutOfRange("index " + std::to_string(i) + " out of range for length " + std::to_string(n_));
  return i;
}

uint64_t MultiaryTree::access_code(uint64_t i) const {
  check_index(i);
  if (!has_root_) return 0;
  uint64_t id = 0, code = 0;
  for (unsigned beta = 0; beta < levels_; ++beta) {
    const GeneralRS& rs = node(id)->rs;
    const unsigned dg = rs[i];
    i = rs.rank(dg, i) - 1;
    code = (code << digit_bits(beta)) | dg;
    id = child(id, dg);
  }
  return code;
}

uint64_t MultiaryTree::rank_code(uint64_t c, uint64_t i) const {
  check_index(i);
  if (c >= sigma()) throw ContractViolation("rank: code " + std::to_string(c) + " outside alphabet");
  if (!has_root_) return i + 1;
  uint64_t id = 0, cnt = i + 1;
  for (unsigned beta = 0; beta < levels_; ++beta) {
    const Node* nd = node(id);
    if (!nd) return 0;
    const unsigned dg = static_cast<unsigned>(digit(c, beta));
    cnt = nd->rs.rank(dg, cnt - 1);
    if (cnt == 0) return 0;
    id = child(id, dg);
  }
  return cnt;
}

uint64_t MultiaryTree::select_code(uint64_t c, uint64_t j) const {
  const uint64_t total = (c < sigma() && n_ > 0) ? rank_code(c, n_ - 1) : 0;
  if (j == 0 || j > total)
    throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range (count " + std::to_string(total) +
                               ")");
  if (!has_root_) return j - 1;
  std::vector<std::pair<const GeneralRS*, unsigned>> path;
  uint64_t id = 0;
  for (unsigned beta = 0; beta < levels_; ++beta) {
    const unsigned dg = static_cast<unsigned>(digit(c, beta));
    path.emplace_back(&node(id)->rs, dg);
    id = child(id, dg);
  }
  uint64_t pos = j - 1;
  for (auto it = path.rbegin(); it != path.rend(); ++it) pos = it->first->select(it->second, pos + 1);
  return pos;
}

uint64_t MultiaryTree::rank_le_code(uint64_t c, uint64_t i) const {
  check_index(i);
  if (c >= sigma()) throw ContractViolation("rank_le: code " + std::to_string(c) + " outside alphabet");
  if (!has_root_) return i + 1;
  uint64_t id = 0, cnt = i + 1, res = 0;
  for (unsigned beta = 0; beta < levels_ && cnt > 0; ++beta) {
    const Node* nd = node(id);
    if (!nd) return res;
    const unsigned dg = static_cast<unsigned>(digit(c, beta));
    if (dg > 0) res += nd->rs.rank_le(dg - 1, cnt - 1);
    cnt = nd->rs.rank(dg, cnt - 1);
    id = child(id, dg);
  }
  return res + cnt;
}

uint64_t MultiaryTree::access(uint64_t i) const { return map_.raw(access_code(i)); }

uint64_t MultiaryTree::rank(uint64_t raw, uint64_t i) const {
  check_index(i);
  auto c = map_.code(raw);
  return c ? rank_code(*c, i) : 0;
}

uint64_t MultiaryTree::select(uint64_t raw, uint64_t j) const {
  auto c = map_.code(raw);
  if (!c) throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range (count 0)");
  return select_code(*c, j);
}

uint64_t MultiaryTree::rank_le(uint64_t raw, uint64_t i) const {
  check_index(i);
  const uint64_t k = map_.count_le(raw);
  return k == 0 ? 0 : rank_le_code(k - 1, i);
}

void MultiaryTree::save(ByteWriter& out) const {
  out.put_u64(n_);
  out.put_u8(static_cast<uint8_t>(d_));
  out.put_u8(static_cast<uint8_t>(tau_));
  {
    ByteWriter s;
    s.put_word_array(map_.symbols());
    out.put_section(kTagAlphabet, s);
  }
  {
    ByteWriter s;
    PackedBitVector present(has_root_ ? id_count(d_, levels_) : 0);
    for (const auto& nd : nodes_) present.set(nd.id, true);
    s.put_bitvector(present);
    out.put_section(kTagPresence, s);
  }
  for (const auto& nd : nodes_) {
    ByteWriter s;
    nd.rs.save(s);
    out.put_section(kTagNode, s);
  }
}

MultiaryTree MultiaryTree::load(ByteReader& in) {
  MultiaryTree t;
  const uint64_t n = in.u64();
  const unsigned d = in.u8();
  t.tau_ = in.u8();
  {
    ByteReader s = in.section(kTagAlphabet);
    std::vector<uint64_t> sym = s.word_array();
    s.expect_end();
    for (size_t k = 1; k < sym.size(); ++k)
      if (sym[k - 1] >= sym[k]) throw CorruptArchive("alphabet not strictly increasing");
    if (sym.size() > n || (n > 0 && sym.empty())) throw CorruptArchive("alphabet size inconsistent with length");
    t.map_ = AlphabetMap(std::move(sym));
  }
  try {
    t.init_shape(n, d);
  } catch (const ContractViolation& e) {
    throw CorruptArchive(e.what());
  }
  if (t.h_ > 40) throw CorruptArchive("tree too tall");
  std::vector<uint64_t> ids;
  {
    ByteReader s = in.section(kTagPresence);
    PackedBitVector present = s.bitvector();
    s.expect_end();
    if (present.size() != (t.has_root_ ? id_count(t.d_, t.levels_) : 0))
      throw CorruptArchive("presence bitmap has wrong length");
    for (uint64_t i = 0; i < present.size(); ++i)
      if (present[i]) ids.push_back(i);
  }
  t.nodes_.resize(ids.size());
  for (size_t k = 0; k < ids.size(); ++k) {
    ByteReader s = in.section(kTagNode);
    t.nodes_[k].id = ids[k];
    t.nodes_[k].rs = GeneralRS::load(s);
    s.expect_end();
  }
  t.index_nodes();

  // Each node's length and digit width must follow from its parent.
  std::vector<std::pair<uint64_t, unsigned>> level_of;  // (first id, beta)
  uint64_t first = 0, width = 1;
  for (unsigned beta = 0; beta < t.levels_; ++beta, first += width, width *= t.d_) level_of.emplace_back(first, beta);
  for (const auto& nd : t.nodes_) {
    unsigned beta = 0;
    for (const auto& [f, b] : level_of)
      if (nd.id >= f) beta = b;
    if (nd.rs.seq().width() != t.digit_bits(beta)) throw CorruptArchive("node digit width mismatch");
    if (nd.id == 0) {
      if (nd.rs.size() != n) throw CorruptArchive("root length mismatch");
    } else {
      const Node* parent = t.node((nd.id - 1) / t.d_);
      if (!parent) throw CorruptArchive("orphan node " + std::to_string(nd.id));
      if (nd.rs.size() == 0) throw CorruptArchive("empty non-root node stored");
    }
    if (beta + 1 < t.levels_)
      for (unsigned dg = 0; dg < nd.rs.sigma(); ++dg) {
        const Node* cn = t.node(t.child(nd.id, dg));
        if ((cn ? cn->rs.size() : 0) != nd.rs.count(dg))
          throw CorruptArchive("child length mismatch at node " + std::to_string(t.child(nd.id, dg)));
      }
  }
  if (t.has_root_ && !t.node(0)) throw CorruptArchive("root node missing");
  return t;
}

}  // namespace wsds
