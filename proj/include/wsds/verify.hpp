#pragma once

// Randomized cross-checks of built structures against the oracle.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsds/archive.hpp"

namespace wsds {

/// Node bitmaps / levels / digit sequences and every query kind against the
/// oracle. Exhaustive probes when n <= 4096, otherwise `samples` random probes.
/// Returns a description of the first discrepancy.
std::optional<std::string> check_structure(const Structure& s, std::span<const uint64_t> raw, uint64_t samples = 2000,
                                           uint64_t seed = 1);

/// Rebuilds the tree with one bitmap bit flipped (first present node, bit 0).
/// Tree and shaped variants only.
Structure inject_bitmap_fault(const Structure& s);

struct VerifyConfig {
  uint64_t n = 1000;
  uint64_t sigma = 16;
  Variant variant = Variant::kTree;
  std::vector<BuildAlgo> algos = {BuildAlgo::kNaive, BuildAlgo::kPacked, BuildAlgo::kSorted, BuildAlgo::kDomain};
  unsigned tau = 0;
  uint64_t parts = 3;
  unsigned degree = 4;
  bool inject_fault = false;
};

std::vector<uint64_t> random_sequence(uint64_t n, uint64_t sigma, uint64_t seed);

/// One random instance: builds with every algorithm, compares archives byte for
/// byte and checks the first against the oracle.
std::optional<std::string> verify_instance(const VerifyConfig& cfg, uint64_t seed);

}  // namespace wsds
