#include "wsds/archive.hpp"

#include <cstring>

namespace wsds {

namespace {

constexpr char kMagic[5] = {'W', 'S', 'D', 'S', '1'};
constexpr uint8_t kTagBody = 0x20;

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kTree: return "tree";
    case Variant::kShaped: return "shaped";
    case Variant::kMultiary: return "multiary";
    case Variant::kMatrix: return "matrix";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "tree") return Variant::kTree;
  if (s == "shaped" || s == "huffman") return Variant::kShaped;
  if (s == "multiary") return Variant::kMultiary;
  if (s == "matrix") return Variant::kMatrix;
  throw ContractViolation("unknown variant '" + s + "'");
}

const char* algo_name(BuildAlgo a) {
  switch (a) {
    case BuildAlgo::kNaive: return "naive";
    case BuildAlgo::kPacked: return "packed";
    case BuildAlgo::kSorted: return "sorted";
    case BuildAlgo::kDomain: return "domain";
  }
  return "?";
}

BuildAlgo parse_algo(const std::string& s) {
  if (s == "naive") return BuildAlgo::kNaive;
  if (s == "packed") return BuildAlgo::kPacked;
  if (s == "sorted") return BuildAlgo::kSorted;
  if (s == "domain") return BuildAlgo::kDomain;
  throw ContractViolation("unknown algorithm '" + s + "'");
}

Variant Structure::variant() const {
  return std::visit(Overload{[](const WaveletTree& t) {
                               return t.shape().kind() == CodeShape::Kind::kShaped ? Variant::kShaped : Variant::kTree;
                             },
                             [](const MultiaryTree&) { return Variant::kMultiary; },
                             [](const WaveletMatrix&) { return Variant::kMatrix; }},
                    v_);
}

uint64_t Structure::size() const {
  return std::visit([](const auto& s) { return s.size(); }, v_);
}
uint64_t Structure::sigma() const {
  return std::visit([](const auto& s) { return s.sigma(); }, v_);
}
unsigned Structure::tau() const {
  return std::visit([](const auto& s) { return s.tau(); }, v_);
}
unsigned Structure::degree() const {
  if (auto* m = std::get_if<MultiaryTree>(&v_)) return m->degree();
  return 0;
}
uint64_t Structure::bitmap_bits() const {
  return std::visit(Overload{[](const WaveletTree& t) { return t.bitmap_bits(); },
                             [](const MultiaryTree& t) { return t.digit_bits_total(); },
                             [](const WaveletMatrix& m) { return m.bitmap_bits(); }},
                    v_);
}
uint64_t Structure::structure_bytes() const {
  return std::visit([](const auto& s) { return s.structure_bytes(); }, v_);
}
const AlphabetMap& Structure::alphabet() const {
  return std::visit([](const auto& s) -> const AlphabetMap& { return s.alphabet(); }, v_);
}
uint64_t Structure::access(uint64_t i) const {
  return std::visit([&](const auto& s) { return s.access(i); }, v_);
}
uint64_t Structure::rank(uint64_t raw, uint64_t i) const {
  return std::visit([&](const auto& s) { return s.rank(raw, i); }, v_);
}
uint64_t Structure::select(uint64_t raw, uint64_t j) const {
  return std::visit([&](const auto& s) { return s.select(raw, j); }, v_);
}
uint64_t Structure::rank_le(uint64_t raw, uint64_t i) const {
  return std::visit([&](const auto& s) { return s.rank_le(raw, i); }, v_);
}

Structure build_structure(CostMeter& meter, std::span<const uint64_t> raw, const StructureSpec& spec) {
  switch (spec.variant) {
    case Variant::kTree: return Structure(build_wavelet_tree(meter, raw, spec.algo, spec.params));
    case Variant::kShaped: {
      MappedSequence ms = map_alphabet(raw);
      std::vector<uint64_t> freq(ms.map.size(), 0);
      for (uint64_t i = 0; i < ms.codes.size(); ++i) ++freq[ms.codes[i]];
      Codebook book = freq.empty() ? Codebook{} : huffman_codebook(freq);
      return Structure(build_shaped_tree(meter, raw, book, spec.algo, spec.params));
    }
    case Variant::kMultiary: return Structure(MultiaryTree::build(meter, raw, spec.degree, spec.params.tau));
    case Variant::kMatrix: return Structure(WaveletMatrix::build(meter, raw, spec.params.tau));
  }
  throw ContractViolation("unknown variant");
}

std::vector<uint8_t> serialize(const Structure& s) {
  ByteWriter out;
  out.put_bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kMagic), sizeof kMagic));
  out.put_u32(kArchiveVersion);
  out.put_u8(64);
  out.put_u8(static_cast<uint8_t>(s.variant()));
  out.put_u64(s.size());
  out.put_u32(static_cast<uint32_t>(s.sigma()));
  out.put_u8(static_cast<uint8_t>(s.degree()));
  out.put_u8(static_cast<uint8_t>(s.tau()));
  ByteWriter body;
  std::visit([&](const auto& x) { x.save(body); }, s.get());
  out.put_section(kTagBody, body);
  return out.take();
}

Structure deserialize(std::span<const uint8_t> bytes) {
  ByteReader in(bytes);
  auto magic = in.bytes(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) throw CorruptArchive("not a WSDS archive");
  const uint32_t version = in.u32();
  if (version != kArchiveVersion) throw CorruptArchive("unsupported archive version " + std::to_string(version));
  if (in.u8() != 64) throw CorruptArchive("unsupported word size");
  const uint8_t variant = in.u8();
  if (variant > 3) throw CorruptArchive("unknown variant tag " + std::to_string(variant));
  const uint64_t n = in.u64();
  const uint32_t sigma = in.u32();
  const uint8_t d = in.u8();
  const uint8_t tau = in.u8();
  ByteReader body = in.section(kTagBody);
  in.expect_end();
  Structure s;
  switch (static_cast<Variant>(variant)) {
    case Variant::kTree:
    case Variant::kShaped: s = Structure(WaveletTree::load(body)); break;
    case Variant::kMultiary: s = Structure(MultiaryTree::load(body)); break;
    case Variant::kMatrix: s = Structure(WaveletMatrix::load(body)); break;
  }
  body.expect_end();
  if (static_cast<uint8_t>(s.variant()) != variant || s.size() != n || s.sigma() != sigma || s.degree() != d ||
      s.tau() != tau)
    throw CorruptArchive("archive header does not match body");
  return s;
}

}  // namespace wsds
