#include "wsds/wt.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "wsds/tables.hpp"

namespace wsds {

std::optional<uint64_t> AlphabetMap::code(uint64_t raw) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), raw);
  if (it == symbols_.end() || *it != raw) return std::nullopt;
  return static_cast<uint64_t>(it - symbols_.begin());
}

uint64_t AlphabetMap::count_le(uint64_t raw) const {
  return static_cast<uint64_t>(std::upper_bound(symbols_.begin(), symbols_.end(), raw) - symbols_.begin());
}

MappedSequence map_alphabet(std::span<const uint64_t> raw) {
  std::vector<uint64_t> symbols(raw.begin(), raw.end());
  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  MappedSequence out{PackedList(raw.size(), std::max(1u, ceil_log2(symbols.size()))), AlphabetMap(symbols)};
  for (uint64_t i = 0; i < raw.size(); ++i) {
    auto it = std::lower_bound(symbols.begin(), symbols.end(), raw[i]);
    out.codes.set(i, static_cast<uint64_t>(it - symbols.begin()));
  }
  return out;
}

unsigned Codebook::height() const {
  unsigned h = 0;
  for (unsigned l : len) h = std::max(h, l);
  return h;
}

void Codebook::validate() const {
  if (code.size() != len.size()) throw ContractViolation("codebook: code and length tables differ in size");
  std::unordered_set<uint64_t> leaves;
  std::unordered_set<uint64_t> inner;
  for (uint64_t c = 0; c < code.size(); ++c) {
    const unsigned l = len[c];
    if (l > kMaxCodeLength)
      throw ContractViolation("codebook: codeword of symbol " + std::to_string(c) + " longer than 57 bits");
    if (l < 64 && (code[c] >> l) != 0)
      throw ContractViolation("codebook: codeword of symbol " + std::to_string(c) + " wider than its length");
    if (l == 0) continue;
    if (!leaves.insert(heap_id(l, code[c])).second) throw ContractViolation("codebook: duplicate codeword");
    for (unsigned k = 0; k < l; ++k) inner.insert(heap_id(k, code[c] >> (l - k)));
  }
  for (uint64_t id : leaves)
    if (inner.count(id)) throw ContractViolation("codebook: codewords are not prefix-free");
}

Codebook balanced_codebook(uint64_t sigma) {
  Codebook b;
  const unsigned h = sigma <= 1 ? 0 : ceil_log2(sigma);
  b.code.resize(sigma);
  b.len.assign(sigma, h);
  for (uint64_t c = 0; c < sigma; ++c) b.code[c] = c;
  return b;
}

CodeShape CodeShape::balanced(uint64_t sigma) {
  CodeShape s;
  s.kind_ = Kind::kBalanced;
  s.sigma_ = sigma;
  s.h_ = ceil_log2(std::max<uint64_t>(sigma, 2));
  s.has_root_ = sigma != 1;
  return s;
}

CodeShape CodeShape::shaped(Codebook book) {
  book.validate();
  CodeShape s;
  s.kind_ = Kind::kShaped;
  s.sigma_ = book.size();
  s.h_ = book.height();
  s.has_root_ = s.h_ > 0;
  for (uint64_t c = 0; c < book.size(); ++c) {
    const unsigned l = book.len[c];
    if (l == 0) continue;
    s.leaf_[heap_id(l, book.code[c])] = c;
    for (unsigned k = 0; k < l; ++k) s.internal_.insert(heap_id(k, book.code[c] >> (l - k)));
  }
  s.book_ = std::move(book);
  return s;
}

std::optional<uint64_t> CodeShape::symbol_at(unsigned level, uint64_t prefix) const {
  if (kind_ == Kind::kBalanced) {
    if (!has_root_) return level == 0 && sigma_ == 1 ? std::optional<uint64_t>(0) : std::nullopt;
    if (level == h_ && prefix < sigma_) return prefix;
    return std::nullopt;
  }
  if (!has_root_) return level == 0 && sigma_ >= 1 ? std::optional<uint64_t>(0) : std::nullopt;
  auto it = leaf_.find(heap_id(level, prefix));
  if (it == leaf_.end()) return std::nullopt;
  return it->second;
}

unsigned default_tau(uint64_t n, unsigned height) {
  const SizeParams p = SizeParams::for_length(n);
  const unsigned t = static_cast<unsigned>(std::sqrt(static_cast<double>(p.L)));
  const unsigned hi = std::max(1u, std::min(height, p.kappa));
  return std::clamp(t, 1u, hi);
}

unsigned resolve_tau(unsigned requested, uint64_t n, unsigned height) {
  if (requested == 0) return default_tau(n, height);
  const unsigned kappa = SizeParams::for_length(n).kappa;
  if (requested > kappa)
    throw ContractViolation("tau " + std::to_string(requested) + " exceeds the table key width " +
                            std::to_string(kappa));
  return std::min(requested, std::max(1u, height));
}

std::vector<uint64_t> aligned_codes(CostMeter& meter, const PackedList& codes, const CodeShape& shape) {
  const uint64_t n = codes.size();
  std::vector<uint64_t> out(n);
  constexpr uint64_t kBlock = 4096;
  std::atomic<bool> bad{false};
  const bool shaped = shape.kind() == CodeShape::Kind::kShaped;
  parallel_for(meter, (n + kBlock - 1) / kBlock, [&](size_t b, CostMeter& m) {
    const uint64_t lo = b * kBlock;
    const uint64_t hi = std::min(n, lo + kBlock);
    for (uint64_t i = lo; i < hi; ++i) {
      const uint64_t c = codes[i];
      if (shaped && (c >= shape.sigma() || (shape.book().len[c] == 0 && shape.height() > 0))) bad = true;
      else out[i] = shaped && shape.height() == 0 ? 0 : shape.aligned(c);
    }
    m.charge(2 * (hi - lo));
  });
  if (bad) throw ContractViolation("shaped tree: symbol without codeword");
  return out;
}

WaveletTree::WaveletTree(CostMeter& meter, CodeShape shape, AlphabetMap map, uint64_t n, unsigned tau,
                         NodeBitmaps bitmaps)
    : n_(n), tau_(tau), shape_(std::move(shape)), map_(std::move(map)) {
  std::sort(bitmaps.begin(), bitmaps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const SizeParams p = SizeParams::for_length(n);
  auto tables = TableRegistry::instance().word(p.kappa);
  charge_table(meter, tables->build_cost());
  nodes_.resize(bitmaps.size());
  parallel_for(meter, bitmaps.size(), [&](size_t k, CostMeter& m) {
    nodes_[k].id = bitmaps[k].first;
    nodes_[k].rs = BinaryRS::build(m, std::move(bitmaps[k].second), p, tables);
  });
  for (uint32_t k = 0; k < nodes_.size(); ++k) slot_[nodes_[k].id] = k;
}

const WaveletTree::Node* WaveletTree::node(uint64_t id) const {
  auto it = slot_.find(id);
  return it == slot_.end() ? nullptr : &nodes_[it->second];
}

const BinaryRS* WaveletTree::rs_at(unsigned level, uint64_t prefix) const {
  const Node* nd = node(heap_id(level, prefix));
  return nd ? &nd->rs : nullptr;
}

uint64_t WaveletTree::bitmap_bits() const {
  uint64_t b = 0;
  for (const auto& nd : nodes_) b += nd.rs.size();
  return b;
}

uint64_t WaveletTree::structure_bytes() const {
  uint64_t b = map_.size() * 8;
  for (const auto& nd : nodes_) b += nd.rs.bits().words().size() * 8 + nd.rs.overhead_bytes();
  return b;
}

uint64_t WaveletTree::check_index(uint64_t i) const {
  if (i >= n_)
    throw IndexOutOfRange("index " + std::to_string(i) + " out of range for length " + std::to_string(n_));
  return i;
}

uint64_t WaveletTree::access_code(uint64_t i) const {
  check_index(i);
  unsigned l = 0;
  uint64_t q = 0;
  while (shape_.internal(l, q)) {
    const BinaryRS* rs = rs_at(l, q);
    const bool bit = (*rs)[i];
    i = rs->rank(bit, i) - 1;
    q = 2 * q + bit;
    ++l;
  }
  return *shape_.symbol_at(l, q);
}

uint64_t WaveletTree::rank_code(uint64_t c, uint64_t i) const {
  check_index(i);
  if (c >= sigma()) throw ContractViolation("rank: code " + std::to_string(c) + " outside alphabet");
  const unsigned len = shape_.length(c);
  const unsigned h = shape_.height();
  const uint64_t a = shape_.aligned(c);
  uint64_t cnt = i + 1;
  uint64_t q = 0;
  for (unsigned l = 0; l < len; ++l) {
    const bool bit = (a >> (h - 1 - l)) & 1;
    const BinaryRS* rs = rs_at(l, q);
    if (!rs) return 0;
    cnt = rs->rank(bit, cnt - 1);
    if (cnt == 0) return 0;
    q = 2 * q + bit;
  }
  return cnt;
}

uint64_t WaveletTree::count_code(uint64_t c) const { return n_ == 0 ? 0 : rank_code(c, n_ - 1); }

uint64_t WaveletTree::select_code(uint64_t c, uint64_t j) const {
  const uint64_t total = c < sigma() ? count_code(c) : 0;
  if (j == 0 || j > total)
    throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range (count " + std::to_string(total) +
                               ")");
  const unsigned len = shape_.length(c);
  const unsigned h = shape_.height();
  const uint64_t a = shape_.aligned(c);
  std::vector<std::pair<const BinaryRS*, bool>> path;
  path.reserve(len);
  uint64_t q = 0;
  for (unsigned l = 0; l < len; ++l) {
    const bool bit = (a >> (h - 1 - l)) & 1;
    path.emplace_back(rs_at(l, q), bit);
    q = 2 * q + bit;
  }
  uint64_t pos = j - 1;
  for (auto it = path.rbegin(); it != path.rend(); ++it) pos = it->first->select(it->second, pos + 1);
  return pos;
}

uint64_t WaveletTree::rank_le_code(uint64_t c, uint64_t i) const {
  check_index(i);
  if (c >= sigma()) throw ContractViolation("rank_le: code " + std::to_string(c) + " outside alphabet");
  if (shape_.kind() == CodeShape::Kind::kShaped) {
    uint64_t r = 0;
    for (uint64_t s = 0; s <= c; ++s) r += rank_code(s, i);
    return r;
  }
  const unsigned len = shape_.length(c);
  const unsigned h = shape_.height();
  uint64_t res = 0;
  uint64_t cnt = i + 1;
  uint64_t q = 0;
  for (unsigned l = 0; l < len && cnt > 0; ++l) {
    const bool bit = (c >> (h - 1 - l)) & 1;
    const BinaryRS* rs = rs_at(l, q);
    if (!rs) return res;
    const uint64_t ones = rs->rank1(cnt - 1);
    if (bit) {
      res += cnt - ones;
      cnt = ones;
    } else {
      cnt -= ones;
    }
    q = 2 * q + bit;
  }
  return res + cnt;
}

uint64_t WaveletTree::rank(uint64_t raw, uint64_t i) const {
  check_index(i);
  auto c = map_.code(raw);
  return c ? rank_code(*c, i) : 0;
}

uint64_t WaveletTree::select(uint64_t raw, uint64_t j) const {
  auto c = map_.code(raw);
  if (!c) throw OccurrenceOutOfRange("occurrence " + std::to_string(j) + " out of range (count 0)");
  return select_code(*c, j);
}

uint64_t WaveletTree::rank_le(uint64_t raw, uint64_t i) const {
  check_index(i);
  const uint64_t k = map_.count_le(raw);
  return k == 0 ? 0 : rank_le_code(k - 1, i);
}

namespace {

enum : uint8_t { kTagAlphabet = 1, kTagShape = 2, kTagPresence = 3, kTagNode = 4 };

constexpr unsigned kMaxPresenceHeight = 40;

}  // namespace

void WaveletTree::save(ByteWriter& out) const {
  out.put_u64(n_);
  out.put_u8(static_cast<uint8_t>(tau_));
  out.put_u8(static_cast<uint8_t>(shape_.kind()));
  out.put_u8(static_cast<uint8_t>(shape_.height()));
  {
    ByteWriter s;
    s.put_word_array(map_.symbols());
    out.put_section(kTagAlphabet, s);
  }
  if (shape_.kind() == CodeShape::Kind::kShaped) {
    ByteWriter s;
    s.put_word_array(shape_.book().code);
    std::vector<uint64_t> lens(shape_.book().len.begin(), shape_.book().len.end());
    s.put_word_array(lens);
    out.put_section(kTagShape, s);
  }
  {
    ByteWriter s;
    if (shape_.kind() == CodeShape::Kind::kBalanced) {
      PackedBitVector present((uint64_t{1} << shape_.height()) - 1);
      for (const auto& nd : nodes_) present.set(nd.id, true);
      s.put_bitvector(present);
    } else {
      std::vector<uint64_t> ids;
      for (const auto& nd : nodes_) ids.push_back(nd.id);
      s.put_word_array(ids);
    }
    out.put_section(kTagPresence, s);
  }
  for (const auto& nd : nodes_) {
    ByteWriter s;
    nd.rs.save(s);
    out.put_section(kTagNode, s);
  }
}

WaveletTree WaveletTree::load(ByteReader& in) {
  WaveletTree t;
  t.n_ = in.u64();
  t.tau_ = in.u8();
  const uint8_t kind = in.u8();
  const unsigned h = in.u8();
  if (kind > 1) throw CorruptArchive("bad tree shape kind");
  {
    ByteReader s = in.section(kTagAlphabet);
    std::vector<uint64_t> sym = s.word_array();
    s.expect_end();
    for (size_t k = 1; k < sym.size(); ++k)
      if (sym[k - 1] >= sym[k]) throw CorruptArchive("alphabet not strictly increasing");
    if (sym.size() > t.n_ || (t.n_ > 0 && sym.empty())) throw CorruptArchive("alphabet size inconsistent with length");
    t.map_ = AlphabetMap(std::move(sym));
  }
  try {
    if (kind == 0) {
      t.shape_ = CodeShape::balanced(t.map_.size());
    } else {
      ByteReader s = in.section(kTagShape);
      Codebook b;
      b.code = s.word_array();
      for (uint64_t l : s.word_array()) b.len.push_back(static_cast<unsigned>(std::min<uint64_t>(l, 255)));
      s.expect_end();
      if (b.size() != t.map_.size()) throw CorruptArchive("codebook size does not match alphabet");
      t.shape_ = CodeShape::shaped(std::move(b));
    }
  } catch (const ContractViolation& e) {
    throw CorruptArchive(std::string("bad codebook: ") + e.what());
  }
  if (t.shape_.height() != h) throw CorruptArchive("tree height does not match alphabet");
  std::vector<uint64_t> ids;
  {
    ByteReader s = in.section(kTagPresence);
    if (kind == 0) {
      if (h > kMaxPresenceHeight) throw CorruptArchive("tree too tall");
      PackedBitVector present = s.bitvector();
      if (present.size() != (uint64_t{1} << h) - 1) throw CorruptArchive("presence bitmap has wrong length");
      for (uint64_t i = 0; i < present.size(); ++i)
        if (present[i]) ids.push_back(i);
    } else {
      ids = s.word_array();
    }
    s.expect_end();
  }
  for (size_t k = 0; k < ids.size(); ++k) {
    if (k > 0 && ids[k - 1] >= ids[k]) throw CorruptArchive("node ids not increasing");
    if (ids[k] >= (uint64_t{1} << 58) || !t.shape_.internal_id(ids[k])) throw CorruptArchive("node id not internal");
  }
  t.nodes_.resize(ids.size());
  for (size_t k = 0; k < ids.size(); ++k) {
    ByteReader s = in.section(kTagNode);
    t.nodes_[k].id = ids[k];
    t.nodes_[k].rs = BinaryRS::load(s);
    s.expect_end();
    t.slot_[ids[k]] = static_cast<uint32_t>(k);
  }
  // Structural consistency: bitmap lengths follow from the parent's bit counts.
  if (t.shape_.internal(0, 0) && !t.node(0)) throw CorruptArchive("root node missing");
  if (const Node* root = t.node(0); root && root->rs.size() != t.n_) throw CorruptArchive("root length mismatch");
  for (const auto& nd : t.nodes_) {
    if (nd.id != 0 && nd.rs.size() == 0) throw CorruptArchive("empty non-root node stored");
    for (int b = 0; b < 2; ++b) {
      const uint64_t child = 2 * nd.id + 1 + b;
      if (!t.shape_.internal_id(child)) continue;
      const Node* cn = t.node(child);
      const uint64_t want = nd.rs.count(b);
      if ((cn ? cn->rs.size() : 0) != want) throw CorruptArchive("child length mismatch at node " + std::to_string(child));
    }
  }
  for (const auto& nd : t.nodes_) {
    if (nd.id == 0) continue;
    const uint64_t parent = (nd.id - 1) / 2;
    if (!t.node(parent)) throw CorruptArchive("orphan node " + std::to_string(nd.id));
  }
  return t;
}

WaveletTree build_wavelet_tree(CostMeter& meter, std::span<const uint64_t> raw, BuildAlgo algo,
                               const BuildParams& params) {
  MappedSequence ms = map_alphabet(raw);
  CodeShape shape = CodeShape::balanced(ms.map.size());
  const unsigned tau = resolve_tau(params.tau, raw.size(), shape.height());
  std::vector<uint64_t> a = aligned_codes(meter, ms.codes, shape);
  NodeBitmaps bm;
  switch (algo) {
    case BuildAlgo::kNaive: bm = build_bitmaps_naive(meter, a, shape); break;
    case BuildAlgo::kPacked: bm = build_bitmaps_packed(meter, a, shape, tau); break;
    case BuildAlgo::kSorted: bm = build_bitmaps_sorted(meter, a, shape, tau); break;
    case BuildAlgo::kDomain: bm = build_bitmaps_domain(meter, a, shape, tau, params.parts); break;
  }
  return WaveletTree(meter, std::move(shape), std::move(ms.map), raw.size(), tau, std::move(bm));
}

WaveletTree build_shaped_tree(CostMeter& meter, std::span<const uint64_t> raw, const Codebook& book, BuildAlgo algo,
                              const BuildParams& params) {
  MappedSequence ms = map_alphabet(raw);
  if (book.size() != ms.map.size())
    throw ContractViolation("codebook has " + std::to_string(book.size()) + " symbols, input has " +
                            std::to_string(ms.map.size()));
  CodeShape shape = CodeShape::shaped(book);
  const unsigned tau = resolve_tau(params.tau, raw.size(), shape.height());
  std::vector<uint64_t> a = aligned_codes(meter, ms.codes, shape);
  NodeBitmaps bm;
  switch (algo) {
    case BuildAlgo::kNaive: bm = build_bitmaps_naive(meter, a, shape); break;
    case BuildAlgo::kPacked: bm = build_bitmaps_packed(meter, a, shape, tau); break;
    case BuildAlgo::kSorted: bm = build_bitmaps_sorted(meter, a, shape, tau); break;
    case BuildAlgo::kDomain: bm = build_bitmaps_domain(meter, a, shape, tau, params.parts); break;
  }
  return WaveletTree(meter, std::move(shape), std::move(ms.map), raw.size(), tau, std::move(bm));
}

}  // namespace wsds
