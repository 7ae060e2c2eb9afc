#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lhnn/phase.hpp"
#include "lhnn/rng.hpp"

namespace lhnn {

// Fully connected network: input (length 2d) -> P sine hidden layers of equal
// width -> linear output of n_latent values whose sum is the surrogate
// Hamiltonian. n_latent = d in latent mode, n_latent = 1 for the plain
// single-output variant; both run the same code path.
struct Architecture {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_width = 0;
  Eigen::Index hidden_layers = 0;
  Eigen::Index n_latent = 0;

  void validate() const {
    if (input_dim < 1 || hidden_width < 1 || hidden_layers < 1 || n_latent < 1)
      throw ConfigError("Architecture: all sizes must be >= 1");
  }
};

// Weights W[k] and biases b[k], k = 0..P. W[k] for k < P feeds hidden layer
// k+1; W[P] is the linear output map. Shapes must chain with the architecture
// and every entry must be finite.
struct NetworkParams {
  Architecture arch;
  std::vector<Mat> W;
  std::vector<Vec> b;
};

inline void validate_params(const NetworkParams& net) {
  net.arch.validate();
  const Eigen::Index P = net.arch.hidden_layers;
  if (static_cast<Eigen::Index>(net.W.size()) != P + 1 ||
      static_cast<Eigen::Index>(net.b.size()) != P + 1)
    throw DimensionError("NetworkParams: expected " + std::to_string(P + 1) + " layers");
  for (Eigen::Index k = 0; k <= P; ++k) {
    const Eigen::Index rows = (k == P) ? net.arch.n_latent : net.arch.hidden_width;
    const Eigen::Index cols = (k == 0) ? net.arch.input_dim : net.arch.hidden_width;
    if (net.W[k].rows() != rows || net.W[k].cols() != cols || net.b[k].size() != rows)
      throw DimensionError("NetworkParams: layer " + std::to_string(k) + " shape mismatch");
    if (!net.W[k].allFinite() || !all_finite(net.b[k]))
      throw NumericalDomainError("NetworkParams: non-finite parameter in layer " +
                                 std::to_string(k));
  }
}

// Glorot-uniform weights, zero biases. Weights are filled column major (the
// matrix storage order) so a given seed always produces the same parameters.
inline NetworkParams glorot_init(const Architecture& arch, RandomEngine& rng) {
  arch.validate();
  NetworkParams net;
  net.arch = arch;
  const Eigen::Index P = arch.hidden_layers;
  net.W.resize(P + 1);
  net.b.resize(P + 1);
  for (Eigen::Index k = 0; k <= P; ++k) {
    const Eigen::Index rows = (k == P) ? arch.n_latent : arch.hidden_width;
    const Eigen::Index cols = (k == 0) ? arch.input_dim : arch.hidden_width;
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    net.W[k].resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i)
        net.W[k](i, j) = (2.0 * rng.uniform01() - 1.0) * limit;
    net.b[k] = Vec::Zero(rows);
  }
  return net;
}

inline void check_input_dim(const NetworkParams& net, const Vec& z) {
  if (z.size() != net.arch.input_dim)
    throw DimensionError("network input length " + std::to_string(z.size()) +
                         " does not match architecture input " +
                         std::to_string(net.arch.input_dim));
}

// Latent outputs lambda = W_P u_P + b_P after P sine hidden layers.
inline Vec forward(const NetworkParams& net, const Vec& z) {
  check_input_dim(net, z);
  const Eigen::Index P = net.arch.hidden_layers;
  Vec u = z;
  for (Eigen::Index k = 0; k < P; ++k) u = ((net.W[k] * u + net.b[k]).array().sin()).matrix();
  return net.W[P] * u + net.b[P];
}

// Surrogate Hamiltonian: the sum of the latent outputs.
inline double surrogate_hamiltonian(const NetworkParams& net, const Vec& z) {
  return forward(net, z).sum();
}

// Gradient of the surrogate Hamiltonian with respect to the input, by reverse
// accumulation through the sine layers:
//   v_P = W_P' 1,   v_{k-1} = W_{k-1}' (v_k .* cos(a_k)),   result v_0.
inline Vec input_gradient(const NetworkParams& net, const Vec& z) {
  check_input_dim(net, z);
  const Eigen::Index P = net.arch.hidden_layers;
  std::vector<Vec> c(static_cast<std::size_t>(P));  // c[k-1] = cos(a_k)
  Vec u = z;
  for (Eigen::Index k = 0; k < P; ++k) {
    Vec a = net.W[k] * u + net.b[k];
    c[static_cast<std::size_t>(k)] = a.array().cos().matrix();
    u = a.array().sin().matrix();
  }
  Vec v = net.W[P].colwise().sum().transpose();  // W_P' * ones(n_latent)
  for (Eigen::Index k = P; k >= 1; --k) {
    Vec wt = v.cwiseProduct(c[static_cast<std::size_t>(k - 1)]);
    v = net.W[k - 1].transpose() * wt;
  }
  return v;
}

// Batched forward and input-gradient passes over columns of Z (input_dim x B),
// retaining every intermediate needed to differentiate the reverse pass again
// during training. Notation per column: u_k = sin(a_k), c_k = cos(a_k),
// wt_k = v_k .* c_k, v_{k-1} = W_{k-1}' wt_k, and G = v_0.
struct BatchTrace {
  std::vector<Mat> U;   // U[k] = u_k, k = 0..P (U[0] is the input block)
  std::vector<Mat> C;   // C[k] = c_k, k = 1..P (index 0 unused)
  std::vector<Mat> V;   // V[k] = v_k, k = 0..P
  std::vector<Mat> Wt;  // Wt[k] = wt_k, k = 1..P (index 0 unused)
  Mat G;                // input gradients, input_dim x B
};

inline BatchTrace batch_input_gradient(const NetworkParams& net, const Mat& Z) {
  if (Z.rows() != net.arch.input_dim)
    throw DimensionError("batch_input_gradient: input row count mismatch");
  const Eigen::Index P = net.arch.hidden_layers;
  const Eigen::Index B = Z.cols();
  BatchTrace tr;
  tr.U.resize(static_cast<std::size_t>(P) + 1);
  tr.C.resize(static_cast<std::size_t>(P) + 1);
  tr.V.resize(static_cast<std::size_t>(P) + 1);
  tr.Wt.resize(static_cast<std::size_t>(P) + 1);
  tr.U[0] = Z;
  for (Eigen::Index k = 1; k <= P; ++k) {
    Mat A = (net.W[k - 1] * tr.U[static_cast<std::size_t>(k - 1)]).colwise() + net.b[k - 1];
    tr.C[static_cast<std::size_t>(k)] = A.array().cos().matrix();
    tr.U[static_cast<std::size_t>(k)] = A.array().sin().matrix();
  }
  Vec vP = net.W[P].colwise().sum().transpose();
  tr.V[static_cast<std::size_t>(P)] = vP.replicate(1, B);
  for (Eigen::Index k = P; k >= 1; --k) {
    tr.Wt[static_cast<std::size_t>(k)] = tr.V[static_cast<std::size_t>(k)].cwiseProduct(
        tr.C[static_cast<std::size_t>(k)]);
    tr.V[static_cast<std::size_t>(k - 1)] =
        net.W[k - 1].transpose() * tr.Wt[static_cast<std::size_t>(k)];
  }
  tr.G = tr.V[0];
  return tr;
}

}  // namespace lhnn
