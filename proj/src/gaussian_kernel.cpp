// Compiled with -ffast-math so the transcendental loop maps onto the
// vectorized libm entry points. Nothing outside this file depends on that.
#include "gaussian_kernel.hpp"

#include <cmath>

namespace mfl::detail {

namespace {

constexpr std::uint64_t kPairs = kChunkNormals / 2;
constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;
constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

void normal_chunk(std::uint64_t seed, std::uint32_t stream, std::uint64_t chunk,
                  std::uint32_t step, double* out) {
  std::uint32_t c0[kPairs], c1[kPairs], c2[kPairs], c3[kPairs];
  const std::uint64_t first_pair = chunk * kPairs;
  for (std::uint64_t q = 0; q < kPairs; ++q) {
    const std::uint64_t pair = first_pair + q;
    c0[q] = step;
    c1[q] = stream;
    c2[q] = static_cast<std::uint32_t>(pair);
    c3[q] = static_cast<std::uint32_t>(pair >> 32);
  }
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    for (std::uint64_t q = 0; q < kPairs; ++q) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0[q];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2[q];
      const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[q] ^ k0;
      const auto n1 = static_cast<std::uint32_t>(p1);
      const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[q] ^ k1;
      const auto n3 = static_cast<std::uint32_t>(p0);
      c0[q] = n0;
      c1[q] = n1;
      c2[q] = n2;
      c3[q] = n3;
    }
    k0 += kW0;
    k1 += kW1;
  }
  double radius[kPairs], angle[kPairs];
  for (std::uint64_t q = 0; q < kPairs; ++q) {
    const std::uint64_t b1 = (static_cast<std::uint64_t>(c0[q]) << 32 | c1[q]) >> 11;
    const std::uint64_t b2 = (static_cast<std::uint64_t>(c2[q]) << 32 | c3[q]) >> 11;
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = static_cast<double>(b1 + 1) * kTwoPow53Inv;
    const double u2 = static_cast<double>(b2) * kTwoPow53Inv;
    radius[q] = std::sqrt(-2.0 * std::log(u1));
    angle[q] = kTwoPi * u2;
  }
  double cosine[kPairs], sine[kPairs];
  for (std::uint64_t q = 0; q < kPairs; ++q) cosine[q] = radius[q] * std::cos(angle[q]);
  for (std::uint64_t q = 0; q < kPairs; ++q) sine[q] = radius[q] * std::sin(angle[q]);
  for (std::uint64_t q = 0; q < kPairs; ++q) {
    out[2 * q] = cosine[q];
    out[2 * q + 1] = sine[q];
  }
}

}  // namespace mfl::detail
