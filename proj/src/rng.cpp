#include "doslab/rng.hpp"

namespace doslab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double site_uniform(const RealizationSeed& seed, std::int64_t x, std::int64_t y) {
  std::uint64_t h = splitmix64(seed.master);
  h = splitmix64(h ^ seed.index);
  h = splitmix64(h ^ static_cast<std::uint64_t>(x));
  h = splitmix64(h ^ static_cast<std::uint64_t>(y) ^ 0x5851f42d4c957f2dULL);
  // top 53 bits -> [0, 1)
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace doslab
