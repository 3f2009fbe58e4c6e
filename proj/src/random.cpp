#include "jumpstop/random.hpp"

namespace jumpstop {

namespace {

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t path, StreamTag tag) {
  const std::uint64_t key = mix(mix(mix(seed) ^ path) ^ static_cast<std::uint64_t>(tag));
  return Rng(key);
}

}  // namespace jumpstop
