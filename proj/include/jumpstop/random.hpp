#pragma once

#include <cstdint>
#include <random>

namespace jumpstop {

using Rng = std::mt19937_64;

// Stream tags keep the demand and cost processes on disjoint streams.
enum class StreamTag : std::uint32_t { demand = 1, cost = 2, terminal = 3 };

/// Deterministic substream for one (seed, path, tag) triple. The result does
/// not depend on how paths are distributed over threads.
Rng substream(std::uint64_t seed, std::uint64_t path, StreamTag tag);

}  // namespace jumpstop
