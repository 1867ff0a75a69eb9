#include "mfl/rng.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/density_types.hpp"
#include "mfl/errors.hpp"
#include "gaussian_kernel.hpp"

namespace mfl {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void philox_round(PhiloxCounter& c, const PhiloxKey& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index,
                       std::uint32_t step) {
  double chunk[detail::kChunkNormals];
  detail::normal_chunk(seed, static_cast<std::uint32_t>(stream), index / detail::kChunkNormals,
                       step, chunk);
  return chunk[index % detail::kChunkNormals];
}

void fill_standard_normals(std::uint64_t seed, Stream stream, std::uint64_t first,
                           std::uint32_t step, std::span<double> out) {
  constexpr std::uint64_t W = detail::kChunkNormals;
  const auto s = static_cast<std::uint32_t>(stream);
  double buf[W];
  std::uint64_t i = 0;
  const std::uint64_t n = out.size();
  while (i < n) {
    const std::uint64_t idx = first + i;
    const std::uint64_t chunk = idx / W;
    const std::uint64_t offset = idx % W;
    const std::uint64_t take = std::min<std::uint64_t>(W - offset, n - i);
    if (offset == 0 && take == W) {
      detail::normal_chunk(seed, s, chunk, step, out.data() + i);
    } else {
      detail::normal_chunk(seed, s, chunk, step, buf);
      std::copy_n(buf + offset, take, out.data() + i);
    }
    i += take;
  }
}

NoiseSource::NoiseSource(std::uint64_t seed, double h_fine, std::uint32_t refinement_ratio)
    : seed_(seed),
      h_fine_(h_fine),
      sqrt_h_fine_(std::sqrt(h_fine)),
      refinement_ratio_(refinement_ratio) {
  if (!(h_fine > 0.0)) throw ConfigError("NoiseSource: h_fine must be positive");
  if (refinement_ratio == 0 || (refinement_ratio & (refinement_ratio - 1)) != 0) {
    throw ConfigError("NoiseSource: refinement ratio must be a power of two");
  }
}

double NoiseSource::increment(std::uint64_t particle, std::uint32_t step) const {
  return sqrt_h_fine_ * standard_normal(seed_, Stream::BrownianIncrement, particle, step);
}

double NoiseSource::coarse_increment(std::uint64_t particle, std::uint32_t coarse_step,
                                     std::int64_t ratio) const {
  if (ratio <= 0) throw ConfigError("coarse_increment: ratio must be positive");
  const auto r = static_cast<std::uint64_t>(ratio);
  const std::uint64_t first = static_cast<std::uint64_t>(coarse_step) * r;
  if (first + r - 1 > 0xFFFFFFFFull) {
    throw ConfigError("coarse_increment: fine step index exceeds 32 bits");
  }
  double sum = 0.0;
  for (std::uint64_t k = 0; k < r; ++k) {
    sum += increment(particle, static_cast<std::uint32_t>(first + k));
  }
  return sum;
}

double NoiseSource::coarse_increment(std::uint64_t particle, std::uint32_t coarse_step) const {
  return coarse_increment(particle, coarse_step, refinement_ratio_);
}

void NoiseSource::fill_increments(std::uint64_t first, std::uint32_t coarse_step,
                                  std::int64_t ratio, std::span<double> out) const {
  if (ratio <= 0) throw ConfigError("fill_increments: ratio must be positive");
  const auto r = static_cast<std::uint64_t>(ratio);
  const std::uint64_t fine_first = static_cast<std::uint64_t>(coarse_step) * r;
  if (fine_first + r - 1 > 0xFFFFFFFFull) {
    throw ConfigError("fill_increments: fine step index exceeds 32 bits");
  }
  if (r == 1) {
    fill_standard_normals(seed_, Stream::BrownianIncrement, first, coarse_step, out);
    for (double& x : out) x *= sqrt_h_fine_;
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> fine(out.size());
  for (std::uint64_t k = 0; k < r; ++k) {
    fill_standard_normals(seed_, Stream::BrownianIncrement, first,
                          static_cast<std::uint32_t>(fine_first + k), fine);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sqrt_h_fine_ * fine[i];
  }
}

std::vector<double> NoiseSource::initial_positions(std::size_t n, const GaussianLaw& law) const {
  if (!(law.variance >= 0.0)) throw ConfigError("initial law: variance must be non-negative");
  const double sd = law.stddev();
  std::vector<double> x(n, 0.0);
  if (sd > 0.0) fill_standard_normals(seed_, Stream::InitialCondition, 0, 0, x);
  for (double& xi : x) xi = law.mean + sd * xi;
  return x;
}

}  // namespace mfl
