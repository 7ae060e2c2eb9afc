#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "lhnn/network.hpp"
#include "lhnn/rng.hpp"

namespace {

lhnn::NetworkParams small_net(Eigen::Index input_dim, Eigen::Index width,
                              Eigen::Index layers, Eigen::Index n_latent,
                              std::uint64_t seed) {
  lhnn::Architecture arch{input_dim, width, layers, n_latent};
  lhnn::RandomEngine rng(seed);
  return lhnn::glorot_init(arch, rng);
}

// Plain-loop forward pass written independently of the library: scalar loops,
// no Eigen products, used as the oracle for the vectorized implementation.
lhnn::Vec naive_forward(const lhnn::NetworkParams& net, const lhnn::Vec& z) {
  std::vector<double> u(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) u[static_cast<std::size_t>(i)] = z[i];
  const Eigen::Index P = net.arch.hidden_layers;
  for (Eigen::Index k = 0; k < P; ++k) {
    std::vector<double> next(static_cast<std::size_t>(net.W[k].rows()));
    for (Eigen::Index i = 0; i < net.W[k].rows(); ++i) {
      double a = net.b[k][i];
      for (Eigen::Index j = 0; j < net.W[k].cols(); ++j)
        a += net.W[k](i, j) * u[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = std::sin(a);
    }
    u = std::move(next);
  }
  lhnn::Vec out(net.arch.n_latent);
  for (Eigen::Index i = 0; i < net.arch.n_latent; ++i) {
    double a = net.b[P][i];
    for (Eigen::Index j = 0; j < net.W[P].cols(); ++j)
      a += net.W[P](i, j) * u[static_cast<std::size_t>(j)];
    out[i] = a;
  }
  return out;
}

}  // namespace

TEST_CASE("forward pass matches a scalar-loop reimplementation", "[network]") {
  const auto net = small_net(4, 7, 3, 2, 101);
  lhnn::RandomEngine rng(55);
  for (int rep = 0; rep < 10; ++rep) {
    lhnn::Vec z(4);
    for (int i = 0; i < 4; ++i) z[i] = rng.normal();
    const lhnn::Vec got = lhnn::forward(net, z);
    const lhnn::Vec want = naive_forward(net, z);
    REQUIRE(got.size() == 2);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("surrogate Hamiltonian is the sum of the latent outputs", "[network]") {
  const auto net = small_net(6, 9, 2, 3, 7);
  lhnn::RandomEngine rng(3);
  lhnn::Vec z(6);
  for (int i = 0; i < 6; ++i) z[i] = rng.normal();
  CHECK(lhnn::surrogate_hamiltonian(net, z) == lhnn::forward(net, z).sum());
}

TEST_CASE("input gradient matches finite differences", "[network]") {
  const auto net = small_net(4, 8, 3, 4, 13);
  lhnn::RandomEngine rng(29);
  for (int rep = 0; rep < 5; ++rep) {
    lhnn::Vec z(4);
    for (int i = 0; i < 4; ++i) z[i] = rng.normal();
    const lhnn::Vec got = lhnn::input_gradient(net, z);
    const lhnn::Vec want = lhnn_test::fd_gradient(
        [&](const lhnn::Vec& x) { return lhnn::surrogate_hamiltonian(net, x); }, z);
    CHECK(lhnn_test::max_rel_err(got, want, 1e-6) <= 1e-6);
  }
}

TEST_CASE("single hidden layer at zero input has a closed-form gradient", "[network]") {
  // With P = 1 and zero biases at z = 0: a_1 = 0, cos(a_1) = 1, so the input
  // gradient is exactly W_0' (W_1' 1).
  auto net = small_net(3, 5, 1, 2, 17);
  for (auto& b : net.b) b.setZero();
  const lhnn::Vec z = lhnn::Vec::Zero(3);
  const lhnn::Vec want = net.W[0].transpose() *
                         lhnn::Vec(net.W[1].colwise().sum().transpose());
  const lhnn::Vec got = lhnn::input_gradient(net, z);
  CHECK(got == want);
  // And the surrogate at zero input is the sum of the output biases (= 0).
  CHECK(lhnn::surrogate_hamiltonian(net, z) == 0.0);
}

TEST_CASE("batched pass agrees with per-sample passes", "[network]") {
  const auto net = small_net(4, 6, 2, 3, 23);
  lhnn::RandomEngine rng(77);
  const Eigen::Index B = 9;
  lhnn::Mat Z(4, B);
  for (Eigen::Index j = 0; j < B; ++j)
    for (Eigen::Index i = 0; i < 4; ++i) Z(i, j) = rng.normal();
  const auto tr = lhnn::batch_input_gradient(net, Z);
  REQUIRE(tr.G.rows() == 4);
  REQUIRE(tr.G.cols() == B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const lhnn::Vec per = lhnn::input_gradient(net, Z.col(j));
    CHECK((tr.G.col(j) - per).cwiseAbs().maxCoeff() <= 1e-12);
    // The trace's top hidden activation must match the forward pass too.
    const lhnn::Vec out = net.W[net.arch.hidden_layers] *
                              tr.U[static_cast<std::size_t>(net.arch.hidden_layers)].col(j) +
                          net.b[net.arch.hidden_layers];
    CHECK((out - lhnn::forward(net, Z.col(j))).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("glorot initialization is deterministic per seed with zero biases",
          "[network]") {
  const auto a = small_net(8, 16, 3, 4, 314);
  const auto b = small_net(8, 16, 3, 4, 314);
  const auto c = small_net(8, 16, 3, 4, 315);
  REQUIRE(a.W.size() == 4);
  for (std::size_t k = 0; k < a.W.size(); ++k) {
    CHECK(a.W[k] == b.W[k]);
    CHECK(a.b[k].isZero(0.0));
    const Eigen::Index rows = a.W[k].rows(), cols = a.W[k].cols();
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    CHECK(a.W[k].cwiseAbs().maxCoeff() <= limit);
  }
  CHECK(a.W[0] != c.W[0]);
}

TEST_CASE("parameter validation catches shape and value errors", "[network]") {
  SECTION("bad architecture") {
    lhnn::Architecture arch{0, 4, 1, 1};
    CHECK_THROWS_AS(arch.validate(), lhnn::ConfigError);
  }
  SECTION("wrong layer count") {
    auto net = small_net(2, 4, 2, 1, 1);
    net.W.pop_back();
    CHECK_THROWS_AS(lhnn::validate_params(net), lhnn::DimensionError);
  }
  SECTION("wrong weight shape") {
    auto net = small_net(2, 4, 2, 1, 1);
    net.W[1].resize(3, 4);
    CHECK_THROWS_AS(lhnn::validate_params(net), lhnn::DimensionError);
  }
  SECTION("wrong bias length") {
    auto net = small_net(2, 4, 2, 1, 1);
    net.b[0] = lhnn::Vec::Zero(5);
    CHECK_THROWS_AS(lhnn::validate_params(net), lhnn::DimensionError);
  }
  SECTION("non-finite weight") {
    auto net = small_net(2, 4, 2, 1, 1);
    net.W[1](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lhnn::validate_params(net), lhnn::NumericalDomainError);
  }
  SECTION("well-formed parameters pass") {
    CHECK_NOTHROW(lhnn::validate_params(small_net(2, 4, 2, 1, 1)));
  }
}

TEST_CASE("input length mismatches are rejected", "[network]") {
  const auto net = small_net(4, 5, 2, 1, 9);
  const lhnn::Vec z3 = lhnn::Vec::Zero(3);
  CHECK_THROWS_AS(lhnn::forward(net, z3), lhnn::DimensionError);
  CHECK_THROWS_AS(lhnn::input_gradient(net, z3), lhnn::DimensionError);
  CHECK_THROWS_AS(lhnn::batch_input_gradient(net, lhnn::Mat::Zero(3, 2)),
                  lhnn::DimensionError);
}

TEST_CASE("single-output and latent variants share one code path", "[network]") {
  // n_latent = 1 is just the latent network with one output; the surrogate
  // equals that single output exactly.
  const auto net = small_net(4, 6, 2, 1, 41);
  lhnn::RandomEngine rng(8);
  lhnn::Vec z(4);
  for (int i = 0; i < 4; ++i) z[i] = rng.normal();
  CHECK(lhnn::surrogate_hamiltonian(net, z) == lhnn::forward(net, z)[0]);
}
