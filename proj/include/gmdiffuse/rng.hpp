#pragma once

#include <cstdint>
#include <random>

namespace gmdiffuse {

/// Mixes (seed, stream) into an independent 64-bit seed. Streams derived this
/// way depend only on their index, so results do not change with thread count
/// or with how many streams a caller asks for.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Number of points generated from one stream by the chunked samplers.
inline constexpr std::size_t kStreamChunk = 1024;

}  // namespace gmdiffuse
