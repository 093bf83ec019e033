#include "wsds/bits.hpp"

#include <string>

namespace wsds {

uint64_t BitBuffer::append_buffer(const BitBuffer& other) {
  if (other.bits_ == 0) return 0;
  const unsigned off = bits_ & 63;
  if (off == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    bits_ += other.bits_;
    return other.words_.size();
  }
  uint64_t touched = 0;
  uint64_t remaining = other.bits_;
  for (uint64_t w : other.words_) {
    const unsigned len = static_cast<unsigned>(std::min<uint64_t>(64, remaining));
    append_bits(w, len);
    remaining -= len;
    ++touched;
  }
  return touched + 1;
}

BitBuffer BitBuffer::from_words(std::vector<uint64_t> words, uint64_t bits) {
  BitBuffer b;
  words.resize(words_for_bits(bits), 0);
  if (bits & 63) words.back() &= low_mask(bits & 63);
  b.words_ = std::move(words);
  b.bits_ = bits;
  return b;
}

PackedBitVector PackedBitVector::from_bools(const std::vector<bool>& bits) {
  PackedBitVector v;
  v.reserve_bits(bits.size());
  for (bool b : bits) v.push_back(b);
  return v;
}

PackedBitVector PackedBitVector::from_string(std::string_view s) {
  PackedBitVector v;
  for (char c : s) {
    if (c != '0' && c != '1') throw ContractViolation("PackedBitVector::from_string: expected 0/1");
    v.push_back(c == '1');
  }
  return v;
}

std::string PackedBitVector::to_string() const {
  std::string s;
  s.reserve(bits_);
  for (uint64_t i = 0; i < bits_; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

PackedList::PackedList(unsigned width) : width_(width) {
  if (width < 1 || width > kWordBits) throw ContractViolation("PackedList: width must be in [1, 64]");
}

PackedList::PackedList(uint64_t count, unsigned width) : PackedList(width) {
  bits_ = BitBuffer(count * width);
  count_ = count;
}

PackedList PackedList::pack(std::span<const uint64_t> values, unsigned width) {
  PackedList out(width);
  out.bits_.reserve_bits(values.size() * width);
  for (uint64_t v : values) out.push_back(v);
  return out;
}

uint64_t PackedList::get(uint64_t i) const {
  if (i >= count_)
    throw IndexOutOfRange("PackedList::get: index " + std::to_string(i) + " >= " + std::to_string(count_));
  return (*this)[i];
}

void PackedList::set(uint64_t i, uint64_t value) {
  if (i >= count_)
    throw IndexOutOfRange("PackedList::set: index " + std::to_string(i) + " >= " + std::to_string(count_));
  if (value > low_mask(width_)) throw ContractViolation("PackedList::set: value exceeds width");
  bits_.write_bits(i * width_, value, width_);
}

void PackedList::push_back(uint64_t value) {
  if (value > low_mask(width_))
    throw ContractViolation("PackedList: value " + std::to_string(value) + " does not fit in " +
                            std::to_string(width_) + " bits");
  bits_.append_bits(value, width_);
  ++count_;
}

void PackedList::append(const PackedList& other, CostMeter& meter) {
  if (other.width_ != width_) throw ContractViolation("PackedList::append: width mismatch");
  bits_.append_buffer(other.bits_);
  count_ += other.count_;
  meter.charge(1 + words_for_bits(other.count_ * other.width_));
}

std::vector<PackedList> PackedList::split(uint64_t k, CostMeter& meter) const {
  if (k == 0) throw ContractViolation("PackedList::split: chunk size must be >= 1");
  std::vector<PackedList> out;
  out.reserve((count_ + k - 1) / k);
  for (uint64_t start = 0; start < count_; start += k) {
    const uint64_t len = std::min(k, count_ - start);
    PackedList chunk(width_);
    uint64_t pos = start * width_;
    uint64_t left = len * width_;
    while (left > 0) {
      const unsigned take = static_cast<unsigned>(std::min<uint64_t>(64, left));
      chunk.bits_.append_bits(bits_.extract(pos, take), take);
      pos += take;
      left -= take;
    }
    chunk.count_ = len;
    meter.charge(1 + words_for_bits(len * width_));
    out.push_back(std::move(chunk));
  }
  return out;
}

std::vector<uint64_t> PackedList::unpack() const {
  std::vector<uint64_t> v(count_);
  for (uint64_t i = 0; i < count_; ++i) v[i] = (*this)[i];
  return v;
}

PackedList PackedList::from_buffer(BitBuffer bits, uint64_t count, unsigned width) {
  PackedList p(width);
  if (bits.size_bits() != count * width) throw ContractViolation("PackedList::from_buffer: size mismatch");
  p.bits_ = std::move(bits);
  p.count_ = count;
  return p;
}

PackedList append(const PackedList& a, const PackedList& b, CostMeter& meter) {
  PackedList out = a;
  out.append(b, meter);
  return out;
}

PackedList append(const PackedList& a, const PackedList& b) {
  CostMeter scratch;
  return append(a, b, scratch);
}

ShortlistTable::ShortlistTable(unsigned tau, unsigned cap) : tau_(tau), cap_(cap) {
  if (tau < 1 || cap < 1 || uint64_t{tau} * cap > kMaxKeyBits)
    throw ContractViolation("ShortlistTable: need tau >= 1, cap >= 1 and tau*cap <= 16 (tau=" +
                            std::to_string(tau) + ", cap=" + std::to_string(cap) + ")");
  base_.resize(cap + 1);
  uint64_t total = 0;
  for (unsigned len = 0; len <= cap; ++len) {
    base_[len] = total;
    total += (uint64_t{1} << (len * tau)) * tau;
  }
  entries_.resize(total);
  const uint64_t elem_mask = low_mask(tau);
  parallel_for(build_cost_, entries_.size(), [&](size_t idx, CostMeter& m) {
    unsigned len = cap;
    while (base_[len] > idx) --len;
    const uint64_t rel = idx - base_[len];
    const unsigned t = static_cast<unsigned>(rel >> (len * tau));
    const uint64_t chunk = rel & low_mask(len * tau);
    Entry e;
    unsigned lo_bits = 0;
    unsigned hi_bits = 0;
    for (unsigned j = 0; j < len; ++j) {
      const uint64_t elem = (chunk >> (j * tau)) & elem_mask;
      const bool b = (elem >> (tau - 1 - t)) & 1;
      if (b) {
        e.bitmap |= uint16_t(1u << j);
        e.hi |= uint16_t(elem << hi_bits);
        hi_bits += tau;
        ++e.hi_count;
      } else {
        e.lo |= uint16_t(elem << lo_bits);
        lo_bits += tau;
        ++e.lo_count;
      }
    }
    entries_[idx] = e;
    m.charge(1 + 2 * len);
  });
}

}  // namespace wsds
