#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lhnn/network.hpp"

namespace lhnn {

// Supervised set for Hamilton's-equations regression. Row i of inputs is a
// phase point z = (q, p) of length 2d; row i of targets is (dq/dt, dp/dt)
// evaluated exactly at that point: dq/dt = p ./ m and dp/dt = -grad U(q).
// gradients_reported is the bookkeeping figure for the generation run (one
// gradient per stored row); gradients_actual additionally counts the single
// bootstrap evaluation at the chain origin.
struct TrainingSet {
  Mat inputs;
  Mat targets;
  std::uint64_t gradients_reported = 0;
  std::uint64_t gradients_actual = 0;
};

inline void validate_training_set(const TrainingSet& data) {
  if (data.inputs.rows() == 0) throw ConfigError("TrainingSet: empty");
  if (data.inputs.rows() != data.targets.rows() || data.inputs.cols() != data.targets.cols())
    throw DimensionError("TrainingSet: inputs and targets must share shape");
  if (data.inputs.cols() % 2 != 0)
    throw DimensionError("TrainingSet: row length must be 2d");
  if (!data.inputs.allFinite() || !data.targets.allFinite())
    throw NumericalDomainError("TrainingSet: non-finite entry");
}

// Parameter-shaped container used for loss gradients and optimizer state.
struct ParamGradient {
  std::vector<Mat> W;
  std::vector<Vec> b;
};

inline ParamGradient zero_like(const NetworkParams& net) {
  ParamGradient g;
  g.W.reserve(net.W.size());
  g.b.reserve(net.b.size());
  for (const auto& w : net.W) g.W.push_back(Mat::Zero(w.rows(), w.cols()));
  for (const auto& bb : net.b) g.b.push_back(Vec::Zero(bb.size()));
  return g;
}

namespace detail {

// Assembles the transposed batch blocks for the given rows: Z is 2d x B, and
// Tq / Tp are the d x B targets for dq/dt and dp/dt.
inline void gather_batch(const TrainingSet& data, const std::vector<Eigen::Index>& rows,
                         Mat& Z, Mat& Tq, Mat& Tp) {
  const Eigen::Index two_d = data.inputs.cols();
  const Eigen::Index d = two_d / 2;
  const Eigen::Index B = static_cast<Eigen::Index>(rows.size());
  Z.resize(two_d, B);
  Tq.resize(d, B);
  Tp.resize(d, B);
  for (Eigen::Index j = 0; j < B; ++j) {
    Z.col(j) = data.inputs.row(rows[static_cast<std::size_t>(j)]).transpose();
    Tq.col(j) = data.targets.row(rows[static_cast<std::size_t>(j)]).head(d).transpose();
    Tp.col(j) = data.targets.row(rows[static_cast<std::size_t>(j)]).tail(d).transpose();
  }
}

inline std::vector<Eigen::Index> all_rows(const TrainingSet& data) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.inputs.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
  return rows;
}

inline double loss_from_gradients(const Mat& G, const Mat& Tq, const Mat& Tp) {
  const Eigen::Index d = Tq.rows();
  const Mat Gq = G.topRows(d);
  const Mat Gp = G.bottomRows(d);
  const double B = static_cast<double>(G.cols());
  // Mean over the batch of ||dH/dp - dq/dt||^2 + ||-dH/dq - dp/dt||^2.
  return ((Gp - Tq).squaredNorm() + (Gq + Tp).squaredNorm()) / B;
}

}  // namespace detail

// Hamilton's-equations training loss over the selected rows (all rows when
// omitted): mean over the batch of
//   || dH/dp - dq/dt ||^2 + || -dH/dq - dp/dt ||^2,
// where (dH/dq, dH/dp) is the network's input gradient.
inline double hnn_loss(const NetworkParams& net, const TrainingSet& data,
                       const std::vector<Eigen::Index>& rows) {
  validate_params(net);
  validate_training_set(data);
  if (rows.empty()) throw ConfigError("hnn_loss: empty batch");
  if (data.inputs.cols() != net.arch.input_dim)
    throw DimensionError("hnn_loss: data row length does not match network input");
  Mat Z, Tq, Tp;
  detail::gather_batch(data, rows, Z, Tq, Tp);
  BatchTrace tr = batch_input_gradient(net, Z);
  return detail::loss_from_gradients(tr.G, Tq, Tp);
}

inline double hnn_loss(const NetworkParams& net, const TrainingSet& data) {
  return hnn_loss(net, data, detail::all_rows(data));
}

// Exact gradient of hnn_loss with respect to every weight and bias, computed
// by differentiating the reverse pass itself (the loss contains first
// derivatives of the network, so its parameter gradient is a second-order
// quantity). With the reverse-pass notation of batch_input_gradient and the
// loss adjoint R = dLoss/dG, the recurrences are, per column:
//   upward (k = 1..P, from vbar_0 = R):
//     wtbar_k = W_{k-1} vbar_{k-1}
//     cbar_k  = v_k .* wtbar_k
//     vbar_k  = c_k .* wtbar_k
//   downward (k = P..1, from ubar_P = 0):
//     abar_k    = c_k .* ubar_k - u_k .* cbar_k
//     ubar_{k-1} = W_{k-1}' abar_k
//   parameters:
//     dW_{k-1} = wt_k vbar_{k-1}' + abar_k u_{k-1}'
//     db_{k-1} = abar_k
//     dW_P     = ones(n_latent) vbar_P'
//     db_P     = 0   (the loss never reads the output value, only gradients)
// Everything is batched over columns and divided by the batch size at the end.
inline std::pair<double, ParamGradient> loss_and_parameter_gradient(
    const NetworkParams& net, const TrainingSet& data, const std::vector<Eigen::Index>& rows) {
  validate_params(net);
  validate_training_set(data);
  if (rows.empty()) throw ConfigError("loss_parameter_gradient: empty batch");
  if (data.inputs.cols() != net.arch.input_dim)
    throw DimensionError("loss_parameter_gradient: data row length does not match network input");

  const Eigen::Index P = net.arch.hidden_layers;
  const Eigen::Index d = net.arch.input_dim / 2;
  Mat Z, Tq, Tp;
  detail::gather_batch(data, rows, Z, Tq, Tp);
  BatchTrace tr = batch_input_gradient(net, Z);
  const double loss = detail::loss_from_gradients(tr.G, Tq, Tp);
  const double B = static_cast<double>(Z.cols());

  // Loss adjoint with respect to the input gradient G = (Gq; Gp).
  Mat R(net.arch.input_dim, Z.cols());
  R.topRows(d) = 2.0 * (tr.G.topRows(d) + Tp);
  R.bottomRows(d) = 2.0 * (tr.G.bottomRows(d) - Tq);

  std::vector<Mat> Vbar(static_cast<std::size_t>(P) + 1);
  std::vector<Mat> Cbar(static_cast<std::size_t>(P) + 1);
  Vbar[0] = std::move(R);
  for (Eigen::Index k = 1; k <= P; ++k) {
    Mat Wtbar = net.W[k - 1] * Vbar[static_cast<std::size_t>(k - 1)];
    Cbar[static_cast<std::size_t>(k)] =
        tr.V[static_cast<std::size_t>(k)].cwiseProduct(Wtbar);
    Vbar[static_cast<std::size_t>(k)] =
        tr.C[static_cast<std::size_t>(k)].cwiseProduct(Wtbar);
  }

  ParamGradient grad = zero_like(net);
  Mat Ubar = Mat::Zero(net.arch.hidden_width, Z.cols());
  for (Eigen::Index k = P; k >= 1; --k) {
    Mat Abar = tr.C[static_cast<std::size_t>(k)].cwiseProduct(Ubar) -
               tr.U[static_cast<std::size_t>(k)].cwiseProduct(Cbar[static_cast<std::size_t>(k)]);
    grad.W[k - 1] = (tr.Wt[static_cast<std::size_t>(k)] *
                         Vbar[static_cast<std::size_t>(k - 1)].transpose() +
                     Abar * tr.U[static_cast<std::size_t>(k - 1)].transpose()) /
                    B;
    grad.b[k - 1] = Abar.rowwise().sum() / B;
    if (k > 1) Ubar = net.W[k - 1].transpose() * Abar;
  }
  grad.W[P] = (Vec::Ones(net.arch.n_latent) *
               Vbar[static_cast<std::size_t>(P)].rowwise().sum().transpose()) /
              B;
  grad.b[P].setZero();
  return {loss, std::move(grad)};
}

inline ParamGradient loss_parameter_gradient(const NetworkParams& net, const TrainingSet& data,
                                             const std::vector<Eigen::Index>& rows) {
  return loss_and_parameter_gradient(net, data, rows).second;
}

inline ParamGradient loss_parameter_gradient(const NetworkParams& net, const TrainingSet& data) {
  return loss_parameter_gradient(net, data, detail::all_rows(data));
}

}  // namespace lhnn
