#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mfl {

/// Philox4x32-10 block cipher (Salmon et al., SC'11). Counter-based: the
/// output is a pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Independent draw families sharing one seed.
enum class Stream : std::uint32_t {
  BrownianIncrement = 0,
  InitialCondition = 1,
  /// Monte Carlo replicas of the sensitivity estimators; the step word holds
  /// the replica number.
  ReplicaIncrement = 2,
  ReplicaInitial = 3,
};

/// Standard normal draw addressed by (seed, stream, index, step).
///
/// Transform (fixed; coupled runs rely on it bit for bit): Philox4x32-10 with
/// key = seed and counter = (step, stream, index / 2) gives two 53-bit
/// uniforms u1 in (0, 1], u2 in [0, 1). Box-Muller then yields
/// sqrt(-2 ln u1) cos(2 pi u2) for even indices and the sine branch for odd
/// ones. Draws are generated in fixed chunks of 128 indices, so a single
/// query costs as much as a chunk and returns the same bits as a batch fill.
double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index,
                       std::uint32_t step);

/// out[i] = standard_normal(seed, stream, first + i, step).
void fill_standard_normals(std::uint64_t seed, Stream stream, std::uint64_t first,
                           std::uint32_t step, std::span<double> out);

struct GaussianLaw;  // stationary.hpp / density_types.hpp

/// Deterministic Brownian increments on a fine grid of spacing h_fine.
///
/// increment(p, s) = sqrt(h_fine) * Z(seed, p, s) is N(0, h_fine) and
/// independent across (particle, step). Coarser increments are exact sums of
/// fine ones so runs at different resolutions share one Brownian path.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, double h_fine, std::uint32_t refinement_ratio = 1);

  std::uint64_t seed() const { return seed_; }
  double h_fine() const { return h_fine_; }
  std::uint32_t refinement_ratio() const { return refinement_ratio_; }

  double increment(std::uint64_t particle, std::uint32_t step) const;

  /// Sum of the `ratio` fine increments covering coarse interval `coarse_step`.
  double coarse_increment(std::uint64_t particle, std::uint32_t coarse_step,
                          std::int64_t ratio) const;
  /// Uses the source's own refinement ratio.
  double coarse_increment(std::uint64_t particle, std::uint32_t coarse_step) const;

  /// Fills out[i] = coarse_increment(first + i, coarse_step, ratio).
  void fill_increments(std::uint64_t first, std::uint32_t coarse_step, std::int64_t ratio,
                       std::span<double> out) const;

  /// i.i.d. draws from `law`, deterministic in the seed.
  std::vector<double> initial_positions(std::size_t n, const GaussianLaw& law) const;

 private:
  std::uint64_t seed_;
  double h_fine_;
  double sqrt_h_fine_;
  std::uint32_t refinement_ratio_;
};

}  // namespace mfl
