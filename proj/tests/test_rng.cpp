#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mfl/density_types.hpp"
#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

using namespace mfl;

namespace {

// Box-Muller from the raw cipher output, with the libm scalar functions.
double box_muller_oracle(std::uint64_t seed, std::uint32_t stream, std::uint64_t index,
                         std::uint32_t step) {
  const std::uint64_t pair = index / 2;
  const PhiloxCounter out = philox4x32_10(
      {step, stream, static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t b1 = ((std::uint64_t{out[0]} << 32) | out[1]) >> 11;
  const std::uint64_t b2 = ((std::uint64_t{out[2]} << 32) | out[3]) >> 11;
  const double u1 = static_cast<double>(b1 + 1) / 9007199254740992.0;
  const double u2 = static_cast<double>(b2) / 9007199254740992.0;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? r * std::cos(a) : r * std::sin(a);
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("philox known-answer vectors") {
  // Published Random123 test vectors for philox4x32-10.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                      {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal draws follow the documented transform") {
  const std::uint64_t seeds[] = {0, 7, 0x123456789abcdefull};
  const std::uint64_t indices[] = {0, 1, 2, 63, 64, 127, 128, 129, 1000001, 5000000000ull};
  for (auto seed : seeds) {
    for (auto idx : indices) {
      for (std::uint32_t step : {0u, 1u, 99999u}) {
        for (auto stream : {Stream::BrownianIncrement, Stream::InitialCondition}) {
          const double expect =
              box_muller_oracle(seed, static_cast<std::uint32_t>(stream), idx, step);
          CHECK(standard_normal(seed, stream, idx, step) ==
                doctest::Approx(expect).epsilon(1e-12).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("batch fill is bit-identical to single queries") {
  std::vector<double> batch(1000);
  fill_standard_normals(42, Stream::BrownianIncrement, 37, 5, batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    REQUIRE(batch[i] == standard_normal(42, Stream::BrownianIncrement, 37 + i, 5));
  }
}

TEST_CASE("sample moments of a large batch") {
  const std::size_t n = 1'000'000;
  std::vector<double> z(n);
  fill_standard_normals(3, Stream::BrownianIncrement, 0, 11, z);
  double m1 = 0, m2 = 0, m4 = 0, lag = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += z[i];
    m2 += z[i] * z[i];
    m4 += z[i] * z[i] * z[i] * z[i];
    if (i + 1 < n) lag += z[i] * z[i + 1];
  }
  const double dn = static_cast<double>(n);
  m1 /= dn;
  m2 /= dn;
  m4 /= dn;
  lag /= dn - 1;
  // 4 standard errors: sd(Z) = 1, sd(Z^2) = sqrt(2), sd(Z^4) = sqrt(96).
  CHECK(std::abs(m1) < 4.0 / std::sqrt(dn));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / dn));
  CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / dn));
  CHECK(std::abs(lag) < 4.0 / std::sqrt(dn));

  // Tail frequency beyond 2 against 2 (1 - Phi(2)) = 0.0455003.
  std::size_t tail = 0;
  for (double v : z) tail += std::abs(v) > 2.0;
  const double p = 0.04550026389635842;
  CHECK(std::abs(static_cast<double>(tail) / dn - p) < 4.0 * std::sqrt(p * (1 - p) / dn));
}

TEST_CASE("streams and steps are uncorrelated") {
  const std::size_t n = 200'000;
  std::vector<double> a(n), b(n), c(n);
  fill_standard_normals(9, Stream::BrownianIncrement, 0, 0, a);
  fill_standard_normals(9, Stream::InitialCondition, 0, 0, b);
  fill_standard_normals(9, Stream::BrownianIncrement, 0, 1, c);
  double ab = 0, ac = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += a[i] * b[i];
    ac += a[i] * c[i];
  }
  const double tol = 4.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(ab / n) < tol);
  CHECK(std::abs(ac / n) < tol);
}

TEST_CASE("coarse increments are sums of fine increments") {
  const double h_fine = 0.01 / 8;
  const NoiseSource src(17, h_fine, 8);
  for (std::uint64_t p : {0ull, 5ull, 300ull}) {
    for (std::uint32_t s : {0u, 3u}) {
      double sum = 0.0;
      for (std::uint32_t k = 0; k < 8; ++k) sum += src.increment(p, s * 8 + k);
      CHECK(src.coarse_increment(p, s) == sum);
    }
  }
  std::vector<double> block(300);
  src.fill_increments(0, 2, 8, block);
  for (std::size_t i = 0; i < block.size(); ++i) {
    REQUIRE(block[i] == src.coarse_increment(i, 2, 8));
  }
  CHECK(src.increment(4, 1) == std::sqrt(h_fine) * standard_normal(17, Stream::BrownianIncrement,
                                                                   4, 1));
}

TEST_CASE("coarse increment variance") {
  const NoiseSource src(23, 0.001, 4);
  const std::size_t n = 100'000;
  std::vector<double> x(n);
  src.fill_increments(0, 0, 4, x);
  double s2 = 0.0;
  for (double v : x) s2 += v * v;
  const double var = s2 / static_cast<double>(n);
  CHECK(std::abs(var - 0.004) < 4.0 * 0.004 * std::sqrt(2.0 / n));
}

TEST_CASE("initial positions") {
  const NoiseSource src(1, 0.1);
  const auto x = src.initial_positions(100'000, GaussianLaw{std::numbers::pi, 1.0});
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  CHECK(std::abs(m - std::numbers::pi) < 4.0 / std::sqrt(1e5));

  const auto fixed = src.initial_positions(10, GaussianLaw{2.0, 0.0});
  for (double v : fixed) CHECK(v == 2.0);

  const auto again = NoiseSource(1, 0.5).initial_positions(100, GaussianLaw{0.0, 1.0});
  const auto first = src.initial_positions(100, GaussianLaw{0.0, 1.0});
  CHECK(again == first);
}

TEST_CASE("invalid noise sources") {
  CHECK_THROWS_AS(NoiseSource(1, 0.0), ConfigError);
  CHECK_THROWS_AS(NoiseSource(1, 0.1, 3), ConfigError);
  const NoiseSource src(1, 0.1, 2);
  CHECK_THROWS_AS(src.coarse_increment(0, 0, 0), ConfigError);
  CHECK_THROWS_AS(src.coarse_increment(0, 0xFFFFFFFFu, 2), ConfigError);
}

}
