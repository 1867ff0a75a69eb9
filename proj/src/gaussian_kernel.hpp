#pragma once

#include <cstdint>

namespace mfl::detail {

/// Normals produced per kernel call. Fixed so every query, scalar or batch,
/// runs the identical vectorized code path.
inline constexpr std::uint64_t kChunkNormals = 128;

/// out[k] = standard normal for index chunk * kChunkNormals + k.
/// Index pairs (2q, 2q+1) share one Philox block: cosine and sine branch of
/// Box-Muller respectively.
void normal_chunk(std::uint64_t seed, std::uint32_t stream, std::uint64_t chunk,
                  std::uint32_t step, double* out);

}  // namespace mfl::detail
