#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "lhnn/density_spec.hpp"
#include "lhnn/rng.hpp"
#include "lhnn/target.hpp"

using lhnn::Vec;
using lhnn_test::fd_gradient;
using lhnn_test::max_rel_err;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("standard gaussian potential and gradient") {
  const auto t = lhnn::standard_gaussian(3);
  REQUIRE(t.dim == 3);
  CHECK(lhnn::potential(t, Vec::Zero(3)) == 0.0);
  const Vec q = vec({1.0, -2.0, 0.5});
  CHECK(lhnn::potential(t, q) == Catch::Approx(0.5 * (1.0 + 4.0 + 0.25)));
  CHECK((lhnn::grad_potential(t, q) - q).norm() == 0.0);
}

TEST_CASE("kinetic energy with non-unit mass") {
  const Vec p = vec({1.0, 2.0, 3.0});
  const lhnn::MassVector m{vec({1.0, 2.0, 3.0})};
  CHECK(lhnn::kinetic(p, m) == Catch::Approx(3.0));
  const lhnn::MassVector ones = lhnn::MassVector::ones(3);
  CHECK(lhnn::kinetic(p, ones) == Catch::Approx(7.0));
}

TEST_CASE("hamiltonian splits into potential plus kinetic") {
  const auto t = lhnn::standard_gaussian(2);
  const lhnn::PhaseState z(vec({0.3, -0.7}), vec({1.1, 0.2}));
  const lhnn::MassVector m = lhnn::MassVector::ones(2);
  CHECK(lhnn::hamiltonian(t, z, m) ==
        Catch::Approx(lhnn::potential(t, z.q) + lhnn::kinetic(z.p, m)));
}

TEST_CASE("ill-conditioned gaussian matches its variance ladder") {
  const Vec v = vec({0.01, 0.1, 1.0, 10.0, 100.0});
  const auto t = lhnn::ill_conditioned_gaussian(v);
  Vec q = Vec::Zero(5);
  q[0] = 0.1;
  CHECK(lhnn::potential(t, q) == Catch::Approx(0.5 * 0.01 / 0.01));
  const Vec probe = vec({0.05, -0.2, 1.0, 3.0, -7.0});
  const Vec fd = fd_gradient([&](const Vec& x) { return lhnn::potential(t, x); }, probe);
  CHECK(max_rel_err(lhnn::grad_potential(t, probe), fd) < 1e-6);
  CHECK_THROWS_AS(lhnn::ill_conditioned_gaussian(vec({1.0, 0.0})), lhnn::ConfigError);
}

TEST_CASE("gaussian mixture potential at the origin is 200/49") {
  const auto t = lhnn::gaussian_mixture_1d();
  CHECK(lhnn::potential(t, Vec::Zero(1)) == Catch::Approx(200.0 / 49.0).epsilon(1e-12));
  CHECK(lhnn::grad_potential(t, Vec::Zero(1))[0] == Catch::Approx(0.0).margin(1e-14));
  // Symmetry of the equal-weight mixture.
  CHECK(lhnn::potential(t, vec({0.8})) == Catch::Approx(lhnn::potential(t, vec({-0.8}))));
}

TEST_CASE("gaussian mixture gradient equals the fully normalized density's") {
  // The component normalizers only shift U by a constant, so the gradient of
  // the normalized negative log density must match ours.
  const auto t = lhnn::gaussian_mixture_1d();
  const double sigma = 0.35;
  const auto normalized_u = [sigma](const Vec& q) {
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    const double d1 = q[0] - 1.0, d2 = q[0] + 1.0;
    const double p = 0.5 * norm * std::exp(-0.5 * d1 * d1 / (sigma * sigma)) +
                     0.5 * norm * std::exp(-0.5 * d2 * d2 / (sigma * sigma));
    return -std::log(p);
  };
  for (double x : {-1.4, -0.6, 0.0, 0.3, 1.7}) {
    const Vec q = vec({x});
    const Vec fd = fd_gradient(normalized_u, q);
    CHECK(max_rel_err(lhnn::grad_potential(t, q), fd) < 1e-5);
  }
}

TEST_CASE("mixture far tails stay finite through log-sum-exp") {
  const auto t = lhnn::gaussian_mixture_1d();
  const Vec q = vec({60.0});
  CHECK(std::isfinite(lhnn::potential(t, q)));
  CHECK(std::isfinite(lhnn::grad_potential(t, q)[0]));
}

TEST_CASE("rosenbrock vanishes on the all-ones vector") {
  for (Eigen::Index n : {2, 3, 5}) {
    const auto t = lhnn::rosenbrock(n);
    CHECK(lhnn::potential(t, Vec::Ones(n)) == 0.0);
  }
  const auto t2 = lhnn::rosenbrock(2);
  CHECK(lhnn::potential(t2, Vec::Zero(2)) == Catch::Approx(0.05));
  CHECK_THROWS_AS(lhnn::rosenbrock(1), lhnn::ConfigError);
}

TEST_CASE("rosenbrock gradient matches finite differences") {
  const auto t = lhnn::rosenbrock(3);
  const Vec q = vec({-0.3, 0.8, 1.2});
  const Vec fd = fd_gradient([&](const Vec& x) { return lhnn::potential(t, x); }, q);
  CHECK(max_rel_err(lhnn::grad_potential(t, q), fd) < 1e-6);
}

TEST_CASE("rough well potential and oscillatory gradient") {
  const double eta = 0.01;
  const auto t = lhnn::rough_well(4, eta);
  CHECK(lhnn::potential(t, Vec::Zero(4)) == Catch::Approx(4.0 * eta));
  const Vec q = vec({0.013, -0.4, 1.1, 0.002});
  const Vec g = lhnn::grad_potential(t, q);
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(g[i] == Catch::Approx(q[i] - std::sin(q[i] / eta)).margin(1e-14));
  const Vec fd = fd_gradient([&](const Vec& x) { return lhnn::potential(t, x); }, q, 1e-7);
  CHECK((g - fd).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("neal funnel potential and gradient") {
  const auto t = lhnn::neal_funnel();
  CHECK(lhnn::potential(t, Vec::Zero(2)) == 0.0);
  const Vec q = vec({1.3, -0.9});
  const Vec fd = fd_gradient([&](const Vec& x) { return lhnn::potential(t, x); }, q);
  CHECK(max_rel_err(lhnn::grad_potential(t, q), fd) < 1e-6);
}

TEST_CASE("call counters track attempted evaluations") {
  const auto t = lhnn::standard_gaussian(2);
  const Vec q = Vec::Ones(2);
  lhnn::potential(t, q);
  lhnn::potential(t, q);
  lhnn::potential(t, q);
  lhnn::grad_potential(t, q);
  lhnn::grad_potential(t, q);
  CHECK(t.potential_calls->load() == 3);
  CHECK(t.gradient_calls->load() == 2);
  // Non-finite evaluations throw but still count as attempts.
  Vec bad = Vec::Ones(2);
  bad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(lhnn::potential(t, bad), lhnn::NumericalDomainError);
  CHECK(t.potential_calls->load() == 4);
}

TEST_CASE("dimension mismatches are rejected") {
  const auto t = lhnn::standard_gaussian(3);
  CHECK_THROWS_AS(lhnn::potential(t, Vec::Zero(2)), lhnn::DimensionError);
  CHECK_THROWS_AS(lhnn::grad_potential(t, Vec::Zero(4)), lhnn::DimensionError);
  CHECK_THROWS_AS(lhnn::kinetic(Vec::Zero(3), lhnn::MassVector::ones(2)),
                  lhnn::DimensionError);
}

TEST_CASE("density registry builds every benchmark") {
  lhnn::DensitySpec s;
  s.name = "standard_gaussian";
  s.n = 4;
  CHECK(lhnn::make_target(s).dim == 4);
  s.name = "rosenbrock";
  s.n = 3;
  CHECK(lhnn::make_target(s).dim == 3);
  s.name = "gaussian_mixture_1d";
  CHECK(lhnn::make_target(s).dim == 1);
  s.name = "neal_funnel";
  CHECK(lhnn::make_target(s).dim == 2);
  s.name = "rough_well";
  s.n = 10;
  CHECK(lhnn::make_target(s).dim == 10);
  s.name = "logistic";
  CHECK(lhnn::make_target(s).dim == 8);  // synthetic default
  s.name = "nope";
  CHECK_THROWS_AS(lhnn::make_target(s), lhnn::ConfigError);
}

TEST_CASE("registry default ill-conditioned ladder is the canonical 5-D one") {
  lhnn::DensitySpec s;
  s.name = "ill_conditioned_gaussian";
  const auto t = lhnn::make_target(s);
  REQUIRE(t.dim == 5);
  // U(e_i) = 1 / (2 v_i) pins each variance.
  const double want[5] = {0.01, 0.1, 1.0, 10.0, 100.0};
  for (Eigen::Index i = 0; i < 5; ++i) {
    Vec q = Vec::Zero(5);
    q[i] = 1.0;
    CHECK(lhnn::potential(t, q) == Catch::Approx(0.5 / want[i]));
  }
}

TEST_CASE("mass vector validation") {
  CHECK_THROWS_AS(lhnn::MassVector(vec({1.0, -1.0})), lhnn::NumericalDomainError);
  CHECK_THROWS_AS(lhnn::MassVector(Vec()), lhnn::DimensionError);
  const auto m = lhnn::MassVector::ones(3);
  CHECK(m.dim() == 3);
}

TEST_CASE("phase state validation") {
  CHECK_THROWS_AS(lhnn::PhaseState(Vec::Zero(2), Vec::Zero(3)), lhnn::DimensionError);
  Vec bad = Vec::Zero(2);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lhnn::PhaseState(bad, Vec::Zero(2)), lhnn::NumericalDomainError);
}
