#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lhnn/io.hpp"
#include "lhnn/network.hpp"

namespace lhnn {

// Provenance recorded alongside trained parameters so a sampling run can
// report the training gradient figure without rerunning generation.
struct CheckpointMeta {
  std::string target_name;
  std::uint64_t gradients_reported = 0;
  std::uint64_t gradients_actual = 0;
  std::uint64_t train_steps = 0;
  double learning_rate = 0.0;
  Eigen::Index batch_size = 0;
  std::uint64_t seed = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

struct Checkpoint {
  NetworkParams params;
  CheckpointMeta meta;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Mat& m) {
  // Column-major flat list plus shape; JSON doubles round-trip exactly.
  std::vector<double> flat(static_cast<std::size_t>(m.size()));
  Eigen::Map<Mat>(flat.data(), m.rows(), m.cols()) = m;
  return {{"shape", {m.rows(), m.cols()}}, {"data", flat}};
}

inline Mat matrix_from_json(const nlohmann::json& j) {
  const auto shape = j.at("shape");
  const Eigen::Index rows = shape.at(0).get<Eigen::Index>();
  const Eigen::Index cols = shape.at(1).get<Eigen::Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
    throw ParseError("checkpoint: matrix data length does not match shape");
  Mat m(rows, cols);
  Eigen::Map<Mat>(m.data(), rows, cols) =
      Eigen::Map<const Mat>(flat.data(), rows, cols);
  return m;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  validate_params(ck.params);
  nlohmann::json j;
  j["format"] = "lhnn-checkpoint-v1";
  j["arch"] = {{"input_dim", ck.params.arch.input_dim},
               {"hidden_width", ck.params.arch.hidden_width},
               {"hidden_layers", ck.params.arch.hidden_layers},
               {"n_latent", ck.params.arch.n_latent}};
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t k = 0; k < ck.params.W.size(); ++k) {
    nlohmann::json layer;
    layer["W"] = detail::matrix_to_json(ck.params.W[k]);
    layer["b"] = std::vector<double>(ck.params.b[k].data(),
                                     ck.params.b[k].data() + ck.params.b[k].size());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  j["training"] = {{"target", ck.meta.target_name},
                   {"gradients_reported", ck.meta.gradients_reported},
                   {"gradients_actual", ck.meta.gradients_actual},
                   {"steps", ck.meta.train_steps},
                   {"learning_rate", ck.meta.learning_rate},
                   {"batch_size", ck.meta.batch_size},
                   {"seed", ck.meta.seed},
                   {"initial_loss", ck.meta.initial_loss},
                   {"final_loss", ck.meta.final_loss}};
  write_text_file(path, j.dump(2) + "\n");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint: invalid JSON in " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "lhnn-checkpoint-v1")
      throw ParseError("checkpoint: unknown format tag in " + path);
    Checkpoint ck;
    const auto& arch = j.at("arch");
    ck.params.arch.input_dim = arch.at("input_dim").get<Eigen::Index>();
    ck.params.arch.hidden_width = arch.at("hidden_width").get<Eigen::Index>();
    ck.params.arch.hidden_layers = arch.at("hidden_layers").get<Eigen::Index>();
    ck.params.arch.n_latent = arch.at("n_latent").get<Eigen::Index>();
    for (const auto& layer : j.at("layers")) {
      ck.params.W.push_back(detail::matrix_from_json(layer.at("W")));
      const auto b = layer.at("b").get<std::vector<double>>();
      ck.params.b.push_back(Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size())));
    }
    const auto& tr = j.at("training");
    ck.meta.target_name = tr.at("target").get<std::string>();
    ck.meta.gradients_reported = tr.at("gradients_reported").get<std::uint64_t>();
    ck.meta.gradients_actual = tr.at("gradients_actual").get<std::uint64_t>();
    ck.meta.train_steps = tr.at("steps").get<std::uint64_t>();
    ck.meta.learning_rate = tr.at("learning_rate").get<double>();
    ck.meta.batch_size = tr.at("batch_size").get<Eigen::Index>();
    ck.meta.seed = tr.at("seed").get<std::uint64_t>();
    ck.meta.initial_loss = tr.at("initial_loss").get<double>();
    ck.meta.final_loss = tr.at("final_loss").get<double>();
    validate_params(ck.params);
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint: missing or mistyped field in " + path + ": " + e.what());
  }
}

}  // namespace lhnn
