#pragma once

#include <cstdint>
#include <string_view>

namespace doslab {

/// Identifies one sample point of the disorder ensemble. Every random value
/// drawn for realization `index` is a pure function of (master, index, site).
struct RealizationSeed {
  std::uint64_t master = 0;
  std::uint64_t index = 0;

  friend bool operator==(const RealizationSeed&, const RealizationSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based uniform deviate in [0, 1) for lattice coordinate (x, y).
/// No generator state: evaluation order never changes the value.
double site_uniform(const RealizationSeed& seed, std::int64_t x, std::int64_t y = 0);

/// 64-bit FNV-1a, used for content hashes and cache checksums.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace doslab
