#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "lhnn/errors.hpp"
#include "lhnn/samplers.hpp"

namespace lhnn {

namespace fft_detail {

// Iterative radix-2 Cooley-Tukey transform, in place. The size must be a
// power of two (callers zero-pad). The inverse applies the 1/n scaling.
inline void fft_in_place(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw DiagnosticsError("fft: size must be a nonzero power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t base = 0; base < n; base += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[base + k];
        const std::complex<double> v = a[base + k + len / 2] * w;
        a[base + k] = u + v;
        a[base + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

}  // namespace fft_detail

// Biased autocorrelation estimate of a series at all lags 0..n-1: the series
// is demeaned, zero-padded to the next power of two at least twice its
// length, and the circular theorem turns one forward and one inverse
// transform into every lagged product sum at once. Entry t is the lag-t
// autocovariance divided by the lag-0 value, so the result starts at exactly
// 1. A constant series has no scale to divide by and is rejected.
inline std::vector<double> autocorrelation(const Vec& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw DiagnosticsError("autocorrelation: need at least two points");
  if (!all_finite(series)) throw DiagnosticsError("autocorrelation: non-finite input");
  const double mean = series.mean();
  std::size_t padded = 1;
  while (padded < 2 * static_cast<std::size_t>(n)) padded <<= 1;
  std::vector<std::complex<double>> buf(padded, std::complex<double>(0.0, 0.0));
  for (Eigen::Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = series[i] - mean;
  fft_detail::fft_in_place(buf, false);
  for (auto& z : buf) z = std::complex<double>(std::norm(z), 0.0);
  fft_detail::fft_in_place(buf, true);
  const double c0 = buf[0].real();
  if (!(c0 > static_cast<double>(n) * 1e-300))
    throw DiagnosticsError("autocorrelation: constant chain");
  std::vector<double> rho(static_cast<std::size_t>(n));
  rho[0] = 1.0;
  for (Eigen::Index t = 1; t < n; ++t)
    rho[static_cast<std::size_t>(t)] = buf[static_cast<std::size_t>(t)].real() / c0;
  return rho;
}

struct EssResult {
  double value = 0.0;    // effective sample size, clamped to (0, M]
  std::size_t lag = 0;   // truncation lag of the autocorrelation sum
};

// Effective sample size M / (1 + 2 sum_t rho_t). The sum runs over lags
// 1..cut-1 where cut is the first lag with rho_cut + rho_{cut+1} <= 0
// (initial-positive-sequence truncation); a denominator that is zero,
// negative, or smaller than 1/M has left the estimator's meaningful range
// and the chain length itself is reported, matching the cap at M.
inline EssResult ess_with_lag(const Vec& series) {
  const std::vector<double> rho = autocorrelation(series);
  const double m = static_cast<double>(series.size());
  double s = 0.0;
  std::size_t cut = rho.size() - 1;
  for (std::size_t t = 1; t + 1 < rho.size(); ++t) {
    if (rho[t] + rho[t + 1] <= 0.0) {
      cut = t;
      break;
    }
    s += rho[t];
  }
  const double denom = 1.0 + 2.0 * s;
  double value = denom > 0.0 ? m / denom : m;
  if (!(value > 0.0) || value > m) value = m;
  return {value, cut};
}

inline double ess(const Vec& series) { return ess_with_lag(series).value; }

// Empirical CDF as sorted values with cumulative fractions (i+1)/n;
// right-continuous, nondecreasing, ends at exactly 1.
struct Ecdf {
  std::vector<double> values;
  std::vector<double> fractions;
};

inline Ecdf ecdf(const Vec& samples) {
  const Eigen::Index n = samples.size();
  if (n == 0) throw DiagnosticsError("ecdf: empty input");
  Ecdf out;
  out.values.assign(samples.data(), samples.data() + n);
  std::sort(out.values.begin(), out.values.end());
  out.fractions.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    out.fractions[static_cast<std::size_t>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(n);
  return out;
}

// Two-sample Kolmogorov-Smirnov distance: the largest gap between the two
// empirical CDFs, evaluated by a merge scan that steps both samples past
// every pooled value (ties advance both sides before the gap is read).
inline double ks_distance(const Vec& a, const Vec& b) {
  if (a.size() == 0 || b.size() == 0) throw DiagnosticsError("ks_distance: empty input");
  std::vector<double> xa(a.data(), a.data() + a.size());
  std::vector<double> xb(b.data(), b.data() + b.size());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() || j < xb.size()) {
    double x;
    if (i < xa.size() && (j == xb.size() || xa[i] <= xb[j])) x = xa[i];
    else x = xb[j];
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// One-sample variant against an analytic CDF: the supremum gap is attained
// at a sample point, approaching from either side.
inline double ks_distance_to_cdf(const Vec& samples,
                                 const std::function<double(double)>& cdf) {
  if (samples.size() == 0) throw DiagnosticsError("ks_distance_to_cdf: empty input");
  std::vector<double> x(samples.data(), samples.data() + samples.size());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

// Per-dimension ESS with gradient accounting. Gradient figures follow the
// one-per-leapfrog-step convention of the samplers; evaluation counts sum
// both gradient sources so traditional and surrogate runs are compared on
// the same footing.
struct EssReport {
  std::vector<double> ess;        // per dimension, post-burn-in samples
  std::vector<std::size_t> lags;  // autocorrelation truncation lag per dimension
  std::uint64_t grads_training = 0;
  std::uint64_t grads_evaluation = 0;
  std::uint64_t grads_total = 0;
  double ess_avg = 0.0;
  double ess_per_grad = 0.0;  // ess_avg / grads_total
  double acceptance = 0.0;
  std::uint64_t fallback_samples = 0;
};

// Builds the report from a chain's post-burn-in samples. grads_training
// overrides the count stored on the chain when nonzero (for runs whose
// training happened in a separate process).
inline EssReport report(const Chain& chain, std::uint64_t grads_training = 0) {
  const Mat post = chain.post_burn_in();
  if (post.rows() < 2) throw DiagnosticsError("report: insufficient samples");
  EssReport r;
  r.grads_training = grads_training > 0 ? grads_training : chain.grads_training;
  r.grads_evaluation = chain.grads_target_reported + chain.grads_network_reported;
  r.grads_total = r.grads_training + r.grads_evaluation;
  r.acceptance = chain.acceptance;
  r.fallback_samples = chain.fallback_samples;
  r.ess.reserve(static_cast<std::size_t>(post.cols()));
  r.lags.reserve(static_cast<std::size_t>(post.cols()));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < post.cols(); ++j) {
    const Vec col = post.col(j);
    const EssResult e = ess_with_lag(col);
    r.ess.push_back(e.value);
    r.lags.push_back(e.lag);
    sum += e.value;
  }
  r.ess_avg = sum / static_cast<double>(post.cols());
  r.ess_per_grad = r.grads_total > 0 ? r.ess_avg / static_cast<double>(r.grads_total) : 0.0;
  return r;
}

}  // namespace lhnn
