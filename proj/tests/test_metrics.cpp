#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mfl/metrics.hpp"
#include "mfl/rng.hpp"

using namespace mfl;

namespace {

HistogramDensity hist(std::vector<double> m) { return {0.0, 1.0, std::move(m)}; }

HistogramDensity random_hist(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> m(n);
  double s = 0.0;
  for (double& v : m) s += (v = u(gen));
  for (double& v : m) v /= s;
  return hist(m);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("hand-computed divergences") {
  const auto p = hist({0.5, 0.5});
  const auto q = hist({0.25, 0.75});
  // 0.5 ln 2 + 0.5 ln(2/3)
  CHECK(relative_entropy(p, q) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  CHECK(relative_entropy(p, q) == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(relative_entropy(hist({1.0, 0.0}), hist({0.5, 0.5})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(l2_error(p, q) == doctest::Approx(std::sqrt(2.0 * 0.0625)).epsilon(1e-15));
  CHECK(l2_error(p, q) == l2_error(q, p));
  CHECK(relative_entropy(p, p) == 0.0);
  CHECK(l2_error(p, p) == 0.0);
}

TEST_CASE("empty proxy bins are floored") {
  const auto p = hist({0.5, 0.5});
  const auto q = hist({1.0, 0.0});
  CHECK(std::isinf(relative_entropy(p, q)));
  // Floor 1/(10 N) = 1e-3 with N = 100, then renormalize.
  const double q0 = 1.0 / 1.001, q1 = 1e-3 / 1.001;
  CHECK(relative_entropy(p, q, 100) ==
        doctest::Approx(0.5 * std::log(0.5 / q0) + 0.5 * std::log(0.5 / q1)));
}

TEST_CASE("mismatched layouts are rejected") {
  CHECK_THROWS(relative_entropy(hist({0.5, 0.5}), hist({0.2, 0.3, 0.5})));
  CHECK_THROWS(l2_error(hist({0.5, 0.5}), HistogramDensity{0.0, 2.0, {0.5, 0.5}}));
}

TEST_CASE("Gibbs inequality and triangle inequality on random inputs") {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_hist(gen, 12);
    const auto q = random_hist(gen, 12);
    const auto r = random_hist(gen, 12);
    CHECK(relative_entropy(p, q, 1000) >= 0.0);
    CHECK(l2_error(p, r) <= l2_error(p, q) + l2_error(q, r) + 1e-15);
  }
}

TEST_CASE("weak functional") {
  const std::vector<double> x{1.0, -1.0};
  CHECK(weak_functional(x) == 0.5);
  CHECK(weak_functional(std::vector<double>{-1.0, -0.1}) == 0.0);
  CHECK(weak_functional(x, parse_test_function("identity")) == 0.0);
  CHECK(weak_functional(x, parse_test_function("square")) == 1.0);
  TestFunction tab{TestFunction::Kind::Table, {{0.0, 1.0}, {0.0, 2.0}}};
  CHECK(weak_functional(std::vector<double>{0.5, 3.0}, tab) == doctest::Approx(1.5));
  CHECK(tab.derivative(0.5) == 2.0);
  CHECK_THROWS(parse_test_function("cube"));
}

TEST_CASE("half-normal mean of stationary samples") {
  const std::size_t n = 1'000'000;
  const double var = 0.64 / 3.0;
  std::vector<double> x(n);
  fill_standard_normals(99, Stream::InitialCondition, 0, 0, x);
  for (double& v : x) v *= std::sqrt(var);
  const double expect = std::sqrt(var) / std::sqrt(2.0 * std::numbers::pi);
  CHECK(expect == doctest::Approx(0.18426).epsilon(1e-4));
  // Var(X^+) = var / 2 - expect^2.
  const double se = std::sqrt((0.5 * var - expect * expect) / static_cast<double>(n));
  CHECK(std::abs(weak_functional(x) - expect) < 3.0 * se);
}

TEST_CASE("strong error") {
  const std::vector<std::vector<double>> a{{0.0, 1.0}, {1.0, 2.0}, {3.0, 3.0}};
  CHECK(strong_error(a, a) == 0.0);
  const std::vector<std::vector<double>> b{{0.0, 1.0}, {2.0, 2.0}, {3.0, 6.0}};
  CHECK(strong_error(a, b) == doctest::Approx(std::sqrt(4.5)));
  const std::size_t only_first_two[] = {0, 1};
  CHECK(strong_error(a, b, only_first_two) == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS(strong_error(a, std::vector<std::vector<double>>{{0.0, 1.0}}));
  CHECK_THROWS(strong_error(std::vector<std::vector<double>>{{0.0}},
                            std::vector<std::vector<double>>{{0.0, 1.0}}));
}

TEST_CASE("log-log regression") {
  std::vector<LogPoint> pts;
  for (double x : {0.1, 0.2, 0.5, 1.0, 3.0}) pts.push_back({x, 3.0 * x * x});
  const auto fit = regression_slope(pts);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(fit.intercept == doctest::Approx(std::log10(3.0)).epsilon(1e-13));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-13));

  const LogPoint two[] = {{1.0, 10.0}, {10.0, 1000.0}};
  CHECK(regression_slope(two).slope == doctest::Approx(2.0).epsilon(1e-14));

  const LogPoint one[] = {{1.0, 1.0}};
  CHECK_THROWS(regression_slope(one));
  const LogPoint bad[] = {{1.0, 1.0}, {2.0, 0.0}};
  CHECK_THROWS(regression_slope(bad));
  const LogPoint same[] = {{2.0, 1.0}, {2.0, 3.0}};
  CHECK_THROWS(regression_slope(same));
}

}
