#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "lhnn/phase.hpp"

namespace lhnn {

// A potential-energy model U(q) with analytic gradient. Potentials are defined
// up to an additive constant; each factory documents its exact formula and the
// constant convention it adopts. Counters tally attempted evaluations and are
// atomic so a target may be shared across concurrently running chains.
struct TargetDensity {
  Eigen::Index dim = 0;
  std::string name;
  std::function<double(const Vec&)> potential_fn;
  std::function<Vec(const Vec&)> gradient_fn;
  std::shared_ptr<std::atomic<std::uint64_t>> potential_calls =
      std::make_shared<std::atomic<std::uint64_t>>(0);
  std::shared_ptr<std::atomic<std::uint64_t>> gradient_calls =
      std::make_shared<std::atomic<std::uint64_t>>(0);
};

inline void check_dim(const TargetDensity& t, const Vec& q, const char* op) {
  if (q.size() != t.dim)
    throw DimensionError(std::string(op) + ": expected dimension " + std::to_string(t.dim) +
                         " for " + t.name + ", got " + std::to_string(q.size()));
}

inline double potential(const TargetDensity& t, const Vec& q) {
  check_dim(t, q, "potential");
  t.potential_calls->fetch_add(1, std::memory_order_relaxed);
  const double u = t.potential_fn(q);
  if (!std::isfinite(u))
    throw NumericalDomainError("potential: non-finite value from " + t.name);
  return u;
}

inline Vec grad_potential(const TargetDensity& t, const Vec& q) {
  check_dim(t, q, "grad_potential");
  t.gradient_calls->fetch_add(1, std::memory_order_relaxed);
  Vec g = t.gradient_fn(q);
  if (g.size() != t.dim)
    throw DimensionError("grad_potential: gradient length mismatch from " + t.name);
  if (!all_finite(g))
    throw NumericalDomainError("grad_potential: non-finite gradient from " + t.name);
  return g;
}

inline double kinetic(const Vec& p, const MassVector& m) {
  if (p.size() != m.dim())
    throw DimensionError("kinetic: momentum length " + std::to_string(p.size()) +
                         " does not match mass length " + std::to_string(m.dim()));
  return 0.5 * (p.array().square() / m.m.array()).sum();
}

inline double hamiltonian(const TargetDensity& t, const PhaseState& z, const MassVector& m) {
  return potential(t, z.q) + kinetic(z.p, m);
}

// U(q) = ||q||^2 / 2. Convention: normalization constant dropped; U(0) = 0.
inline TargetDensity standard_gaussian(Eigen::Index n) {
  if (n < 1) throw ConfigError("standard_gaussian: dimension must be >= 1");
  TargetDensity t;
  t.dim = n;
  t.name = "standard_gaussian";
  t.potential_fn = [](const Vec& q) { return 0.5 * q.squaredNorm(); };
  t.gradient_fn = [](const Vec& q) { return q; };
  return t;
}

// U(q) = (1/2) sum_i q_i^2 / v_i with per-dimension variances v_i.
// Convention: normalization constant dropped; U(0) = 0.
inline TargetDensity ill_conditioned_gaussian(Vec variances) {
  if (variances.size() < 1) throw ConfigError("ill_conditioned_gaussian: empty variance list");
  for (Eigen::Index i = 0; i < variances.size(); ++i)
    if (!(variances[i] > 0.0))
      throw ConfigError("ill_conditioned_gaussian: variance " + std::to_string(i) +
                        " must be positive");
  TargetDensity t;
  t.dim = variances.size();
  t.name = "ill_conditioned_gaussian";
  auto v = std::make_shared<Vec>(std::move(variances));
  t.potential_fn = [v](const Vec& q) { return 0.5 * (q.array().square() / v->array()).sum(); };
  t.gradient_fn = [v](const Vec& q) { return Vec(q.array() / v->array()); };
  return t;
}

// Two-component mixture with modes at -1 and +1, sigma = 0.35, equal weights:
//   U(q) = -log( 0.5 exp(-(q-1)^2 / (2 sigma^2)) + 0.5 exp(-(q+1)^2 / (2 sigma^2)) ).
// Convention: component normalizers 1/(sigma sqrt(2 pi)) dropped (they shift U
// by a constant). U(0) = 1 / (2 sigma^2) = 200/49 exactly. Evaluated with
// log-sum-exp so far tails cannot underflow.
inline TargetDensity gaussian_mixture_1d() {
  constexpr double kSigma = 0.35;
  constexpr double kInvVar = 1.0 / (kSigma * kSigma);
  TargetDensity t;
  t.dim = 1;
  t.name = "gaussian_mixture_1d";
  t.potential_fn = [](const Vec& q) {
    const double a1 = -0.5 * kInvVar * (q[0] - 1.0) * (q[0] - 1.0);
    const double a2 = -0.5 * kInvVar * (q[0] + 1.0) * (q[0] + 1.0);
    const double hi = a1 > a2 ? a1 : a2;
    return std::log(2.0) - (hi + std::log(std::exp(a1 - hi) + std::exp(a2 - hi)));
  };
  t.gradient_fn = [](const Vec& q) {
    const double a1 = -0.5 * kInvVar * (q[0] - 1.0) * (q[0] - 1.0);
    const double a2 = -0.5 * kInvVar * (q[0] + 1.0) * (q[0] + 1.0);
    const double hi = a1 > a2 ? a1 : a2;
    const double e1 = std::exp(a1 - hi);
    const double e2 = std::exp(a2 - hi);
    const double r1 = e1 / (e1 + e2);  // responsibility of the +1 mode
    Vec g(1);
    g[0] = kInvVar * (r1 * (q[0] - 1.0) + (1.0 - r1) * (q[0] + 1.0));
    return g;
  };
  return t;
}

// U(q) = sum_{i=1}^{n-1} [ 100 (q_{i+1} - q_i^2)^2 + (1 - q_i)^2 ] / 20.
// U(1, ..., 1) = 0 exactly for every n >= 2.
inline TargetDensity rosenbrock(Eigen::Index n) {
  if (n < 2) throw ConfigError("rosenbrock: dimension must be >= 2");
  TargetDensity t;
  t.dim = n;
  t.name = "rosenbrock";
  t.potential_fn = [n](const Vec& q) {
    double u = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double a = q[i + 1] - q[i] * q[i];
      const double b = 1.0 - q[i];
      u += (100.0 * a * a + b * b) / 20.0;
    }
    return u;
  };
  t.gradient_fn = [n](const Vec& q) {
    Vec g = Vec::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double a = q[i + 1] - q[i] * q[i];
      g[i] += (-400.0 * q[i] * a - 2.0 * (1.0 - q[i])) / 20.0;
      g[i + 1] += 200.0 * a / 20.0;
    }
    return g;
  };
  return t;
}

// U(q) = ||q||^2 / 2 + eta * sum_i cos(q_i / eta), so the gradient
// dU/dq_i = q_i - sin(q_i / eta) carries an order-one high-frequency ripple
// while the potential itself differs from a standard Gaussian by O(eta).
inline TargetDensity rough_well(Eigen::Index n, double eta) {
  if (n < 1) throw ConfigError("rough_well: dimension must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("rough_well: eta must be positive");
  TargetDensity t;
  t.dim = n;
  t.name = "rough_well";
  t.potential_fn = [eta](const Vec& q) {
    return 0.5 * q.squaredNorm() + eta * (q.array() / eta).cos().sum();
  };
  t.gradient_fn = [eta](const Vec& q) { return Vec(q.array() - (q.array() / eta).sin()); };
  return t;
}

// Two-dimensional funnel: q1 ~ N(0, 9) and q2 | q1 ~ N(0, exp(q1)), giving
//   U(q) = q1^2 / 18 + q2^2 / (2 exp(q1)) + q1 / 2.
// The q1/2 term is the conditional log-normalizer; dropping it would change
// the q1 marginal. Convention: remaining constants dropped; U(0, 0) = 0.
inline TargetDensity neal_funnel() {
  TargetDensity t;
  t.dim = 2;
  t.name = "neal_funnel";
  t.potential_fn = [](const Vec& q) {
    return q[0] * q[0] / 18.0 + 0.5 * q[1] * q[1] * std::exp(-q[0]) + 0.5 * q[0];
  };
  t.gradient_fn = [](const Vec& q) {
    const double e = std::exp(-q[0]);
    Vec g(2);
    g[0] = q[0] / 9.0 - 0.5 * q[1] * q[1] * e + 0.5;
    g[1] = q[1] * e;
    return g;
  };
  return t;
}

}  // namespace lhnn
