#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "lhnn/diagnostics.hpp"
#include "lhnn/rng.hpp"
#include "lhnn/samplers.hpp"

namespace {

lhnn::Vec iid_normal(Eigen::Index n, std::uint64_t seed) {
  lhnn::RandomEngine rng(seed);
  lhnn::Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
  return x;
}

lhnn::Vec ar1(Eigen::Index n, double phi, std::uint64_t seed) {
  lhnn::RandomEngine rng(seed);
  lhnn::Vec x(n);
  x[0] = rng.normal();
  for (Eigen::Index i = 1; i < n; ++i) x[i] = phi * x[i - 1] + rng.normal();
  return x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("FFT inverts itself and matches a naive DFT", "[diagnostics]") {
  lhnn::RandomEngine rng(3);
  const std::size_t n = 16;
  std::vector<std::complex<double>> a(n);
  for (auto& z : a) z = {rng.normal(), rng.normal()};
  const auto original = a;

  auto spectrum = a;
  lhnn::fft_detail::fft_in_place(spectrum, false);

  // Naive O(n^2) DFT as the oracle.
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> want(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
      want += original[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    CHECK(std::abs(spectrum[k] - want) <= 1e-12);
  }

  lhnn::fft_detail::fft_in_place(spectrum, true);
  for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(spectrum[t] - original[t]) <= 1e-12);
}

TEST_CASE("FFT rejects sizes that are not powers of two", "[diagnostics]") {
  std::vector<std::complex<double>> bad(6);
  CHECK_THROWS_AS(lhnn::fft_detail::fft_in_place(bad, false), lhnn::DiagnosticsError);
  std::vector<std::complex<double>> empty;
  CHECK_THROWS_AS(lhnn::fft_detail::fft_in_place(empty, false), lhnn::DiagnosticsError);
  std::vector<std::complex<double>> one(1, {2.5, 0.0});
  CHECK_NOTHROW(lhnn::fft_detail::fft_in_place(one, false));
  CHECK(one[0] == std::complex<double>(2.5, 0.0));
}

TEST_CASE("autocorrelation of an alternating series is exactly computable",
          "[diagnostics]") {
  const Eigen::Index n = 64;
  lhnn::Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const auto rho = lhnn::autocorrelation(x);
  REQUIRE(rho.size() == 64);
  CHECK(rho[0] == 1.0);
  // c_t = (n - t) (-1)^t for a zero-mean alternating series, so
  // rho_t = (-1)^t (n - t) / n exactly.
  for (std::size_t t = 1; t < 8; ++t) {
    const double sign = (t % 2 == 0) ? 1.0 : -1.0;
    const double want = sign * static_cast<double>(n - static_cast<Eigen::Index>(t)) /
                        static_cast<double>(n);
    CHECK(rho[t] == Catch::Approx(want).margin(1e-12));
  }
}

TEST_CASE("iid noise has near-zero autocorrelation at every positive lag",
          "[diagnostics]") {
  const auto x = iid_normal(10000, 11);
  const auto rho = lhnn::autocorrelation(x);
  for (std::size_t t = 1; t <= 20; ++t) CHECK(std::abs(rho[t]) < 0.05);
}

TEST_CASE("an AR(1) chain shows geometric autocorrelation decay", "[diagnostics]") {
  const double phi = 0.9;
  const auto x = ar1(20000, phi, 13);
  const auto rho = lhnn::autocorrelation(x);
  for (std::size_t t = 1; t <= 10; ++t)
    CHECK(std::abs(rho[t] - std::pow(phi, static_cast<double>(t))) < 0.05);
}

TEST_CASE("degenerate series are rejected", "[diagnostics]") {
  lhnn::Vec constant = lhnn::Vec::Constant(100, 3.5);
  CHECK_THROWS_AS(lhnn::autocorrelation(constant), lhnn::DiagnosticsError);
  lhnn::Vec single(1);
  single[0] = 1.0;
  CHECK_THROWS_AS(lhnn::autocorrelation(single), lhnn::DiagnosticsError);
  lhnn::Vec with_nan = lhnn::Vec::Zero(10);
  with_nan[3] = std::numeric_limits<double>::quiet_NaN();
  with_nan[5] = 1.0;
  CHECK_THROWS_AS(lhnn::autocorrelation(with_nan), lhnn::DiagnosticsError);
  CHECK_THROWS_AS(lhnn::ess(constant), lhnn::DiagnosticsError);
}

TEST_CASE("ESS of iid draws is close to the sample count", "[diagnostics]") {
  const auto x = iid_normal(20000, 17);
  const double e = lhnn::ess(x);
  CHECK(e >= 0.9 * 20000.0);
  CHECK(e <= 20000.0);  // the estimator is clamped at M
}

TEST_CASE("ESS of an AR(1) chain matches the analytic value", "[diagnostics]") {
  // For AR(1) with coefficient phi, ESS -> M (1 - phi) / (1 + phi) = M / 3
  // at phi = 0.5.
  const Eigen::Index M = 50000;
  const auto x = ar1(M, 0.5, 19);
  const double e = lhnn::ess(x);
  const double want = static_cast<double>(M) / 3.0;
  CHECK(e == Catch::Approx(want).epsilon(0.10));
}

TEST_CASE("ESS is invariant under affine maps of the series", "[diagnostics]") {
  const auto x = ar1(5000, 0.7, 23);
  const lhnn::Vec y = (2.5 * x.array() - 100.0).matrix();
  const auto ex = lhnn::ess_with_lag(x);
  const auto ey = lhnn::ess_with_lag(y);
  CHECK(ex.lag == ey.lag);
  CHECK(lhnn_test::rel_err(ey.value, ex.value) <= 1e-10);
}

TEST_CASE("a perfectly anticorrelated chain caps at the sample count",
          "[diagnostics]") {
  lhnn::Vec x(1000);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
  // rho_1 + rho_2 < 0 truncates immediately, leaving the iid denominator.
  const auto e = lhnn::ess_with_lag(x);
  CHECK(e.value == 1000.0);
  CHECK(e.lag == 1);
}

TEST_CASE("the empirical CDF is sorted, stepped, and ends at one", "[diagnostics]") {
  SECTION("single value") {
    lhnn::Vec x(1);
    x[0] = 4.2;
    const auto F = lhnn::ecdf(x);
    REQUIRE(F.values.size() == 1);
    CHECK(F.values[0] == 4.2);
    CHECK(F.fractions[0] == 1.0);
  }
  SECTION("three values arrive unsorted") {
    lhnn::Vec x(3);
    x << 3.0, 1.0, 2.0;
    const auto F = lhnn::ecdf(x);
    CHECK(F.values == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(F.fractions[0] == Catch::Approx(1.0 / 3.0).margin(1e-15));
    CHECK(F.fractions[1] == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK(F.fractions[2] == 1.0);
  }
  SECTION("fractions are strictly increasing and terminal") {
    const auto x = iid_normal(257, 29);
    const auto F = lhnn::ecdf(x);
    for (std::size_t i = 1; i < F.values.size(); ++i) {
      CHECK(F.values[i] >= F.values[i - 1]);
      CHECK(F.fractions[i] > F.fractions[i - 1]);
    }
    CHECK(F.fractions.back() == 1.0);
  }
  SECTION("empty input") {
    CHECK_THROWS_AS(lhnn::ecdf(lhnn::Vec()), lhnn::DiagnosticsError);
  }
}

TEST_CASE("seeded normal draws pass a DKW-style band against the normal CDF",
          "[diagnostics]") {
  const auto x = iid_normal(10000, 31);
  CHECK(lhnn::ks_distance_to_cdf(x, normal_cdf) < 0.02);
}

TEST_CASE("one-sample KS distance is exact on a hand case", "[diagnostics]") {
  lhnn::Vec x(1);
  x[0] = 0.5;
  const double d =
      lhnn::ks_distance_to_cdf(x, [](double v) { return std::clamp(v, 0.0, 1.0); });
  CHECK(d == 0.5);  // sup over both sides of the single step
}

TEST_CASE("two-sample KS distance handles ties, identity, and disjoint supports",
          "[diagnostics]") {
  lhnn::Vec a(3), b(3);
  a << 1.0, 1.0, 2.0;
  b << 1.0, 2.0, 2.0;
  CHECK(lhnn::ks_distance(a, b) == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK(lhnn::ks_distance(a, a) == 0.0);

  lhnn::Vec lo(4), hi(4);
  lo << 0.0, 1.0, 2.0, 3.0;
  hi << 10.0, 11.0, 12.0, 13.0;
  CHECK(lhnn::ks_distance(lo, hi) == 1.0);

  const auto x = iid_normal(512, 37);
  const auto y = iid_normal(300, 41);
  CHECK(lhnn::ks_distance(x, y) == lhnn::ks_distance(y, x));
  CHECK_THROWS_AS(lhnn::ks_distance(lhnn::Vec(), x), lhnn::DiagnosticsError);
}

TEST_CASE("two large same-law samples sit close in KS distance", "[diagnostics]") {
  const auto x = iid_normal(10000, 43);
  const auto y = iid_normal(10000, 47);
  CHECK(lhnn::ks_distance(x, y) < 0.04);
}

TEST_CASE("the KS triangle inequality holds on sample triples", "[diagnostics]") {
  const auto x = iid_normal(200, 53);
  const auto y = iid_normal(200, 59);
  const auto z = iid_normal(200, 61);
  const double xy = lhnn::ks_distance(x, y);
  const double yz = lhnn::ks_distance(y, z);
  const double xz = lhnn::ks_distance(x, z);
  CHECK(xz <= xy + yz + 1e-15);
}

TEST_CASE("the ESS report aggregates chain accounting", "[diagnostics]") {
  lhnn::Chain chain;
  chain.dim = 2;
  chain.M = 6000;
  chain.burn_in = 1000;
  chain.samples.resize(6000, 2);
  chain.samples.col(0) = iid_normal(6000, 67);
  chain.samples.col(1) = ar1(6000, 0.5, 71);
  chain.acceptance = 0.87;
  chain.fallback_samples = 12;
  chain.grads_target_reported = 4000;
  chain.grads_network_reported = 6000;
  chain.grads_training = 8000;

  const auto r = lhnn::report(chain);
  REQUIRE(r.ess.size() == 2);
  REQUIRE(r.lags.size() == 2);
  CHECK(r.grads_training == 8000);
  CHECK(r.grads_evaluation == 10000);
  CHECK(r.grads_total == 18000);
  CHECK(r.acceptance == 0.87);
  CHECK(r.fallback_samples == 12);
  CHECK(r.ess_avg == Catch::Approx(0.5 * (r.ess[0] + r.ess[1])).margin(1e-12));
  CHECK(r.ess_per_grad == Catch::Approx(r.ess_avg / 18000.0).margin(1e-15));
  // The iid column dominates the autocorrelated one.
  CHECK(r.ess[0] > r.ess[1]);

  // Explicit training figure overrides the chain's stored one.
  const auto r2 = lhnn::report(chain, 500);
  CHECK(r2.grads_training == 500);
  CHECK(r2.grads_total == 10500);

  // Too few post-burn-in rows to autocorrelate.
  lhnn::Chain tiny = chain;
  tiny.burn_in = 5999;
  CHECK_THROWS_MATCHES(lhnn::report(tiny), lhnn::DiagnosticsError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("insufficient samples")));
}
