#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lhnn/checkpoint.hpp"
#include "lhnn/density_spec.hpp"
#include "lhnn/diagnostics.hpp"
#include "lhnn/nuts.hpp"
#include "lhnn/samplers.hpp"
#include "lhnn/train.hpp"

namespace lhnn {

// Full description of a run: one seed, one target, one sampling mode, and
// the training hyperparameters used when a network has to be fitted
// in-process. The sampler's own seed field is ignored; every stream is
// derived from the top-level seed (chain k samples with
// derive_subseed(seed, k), training and data generation use the seed
// directly).
struct RunConfig {
  std::uint64_t seed = 1;
  std::string mode = "nuts";  // hmc | nuts | lhnn-hmc | lhnn-nuts
  std::uint64_t chains = 1;
  DensitySpec target;
  bool target_synthetic = false;  // logistic only: explicit opt-in to the built-in dataset
  SamplerConfig sampler;
  std::uint64_t train_M_t = 40;  // data generation: HMC iterations
  double train_T = 5.0;          // data generation: trajectory end time
  double train_dt = 0.025;       // data generation: step size
  std::uint64_t train_steps = 20000;
  double learning_rate = 5e-4;
  Eigen::Index batch_size = 512;
  Eigen::Index hidden_width = 100;
  Eigen::Index hidden_layers = 3;
  Eigen::Index n_latent = 0;  // 0 = target dimension
  bool train_inline = false;  // lhnn-* without a checkpoint trains in-process
  std::string checkpoint_path;
  std::string output_dir = ".";
  Vec start;  // empty = origin
};

inline bool mode_uses_network(const std::string& mode) {
  return mode.rfind("lhnn-", 0) == 0;
}

inline bool mode_is_tree(const std::string& mode) {
  return mode == "nuts" || mode == "lhnn-nuts";
}

namespace cli_detail {

// Unknown keys are configuration mistakes; report them with their path.
inline void check_keys(const nlohmann::json& j, const std::string& prefix,
                       const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(prefix + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown config key: " + prefix + "." + item.key());
}

// Stop thresholds may be infinite (the -inf sentinel forces fallback on
// every step), which JSON numbers cannot carry; non-finite values travel as
// the strings "inf" / "-inf".
inline nlohmann::json threshold_to_json(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

inline double threshold_from_json(const nlohmann::json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    double out = 0.0;
    if (parse_double_cell(v.get<std::string>(), out)) return out;
  }
  throw ConfigError(field + ": expected a number or \"inf\"/\"-inf\"");
}

template <typename T>
inline void read_into(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace cli_detail

// Canonical serialization: every field is emitted, so the echoed config in
// an output file is the complete effective configuration and hashing it
// identifies the run. parse(serialize(parse(x))) == parse(x).
inline nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json t;
  t["name"] = cfg.target.name;
  t["n"] = cfg.target.n;
  t["eta"] = cfg.target.eta;
  t["diag"] = std::vector<double>(cfg.target.diag.data(),
                                  cfg.target.diag.data() + cfg.target.diag.size());
  t["dataset"] = cfg.target.dataset_path;
  t["intercept"] = cfg.target.intercept;
  t["synthetic"] = cfg.target_synthetic;
  t["synthetic_K"] = cfg.target.synthetic_K;
  t["synthetic_d"] = cfg.target.synthetic_d;
  t["synthetic_seed"] = cfg.target.synthetic_seed;

  nlohmann::json s;
  s["M"] = cfg.sampler.M;
  s["burn_in"] = cfg.sampler.burn_in;
  s["dt"] = cfg.sampler.dt;
  s["T"] = cfg.sampler.T;
  s["max_tree_depth"] = cfg.sampler.max_tree_depth;
  s["delta_lf"] = cli_detail::threshold_to_json(cfg.sampler.delta_lf);
  s["delta_hnn"] = cli_detail::threshold_to_json(cfg.sampler.delta_hnn);
  s["n_lf"] = cfg.sampler.n_lf;

  nlohmann::json tr;
  tr["inline"] = cfg.train_inline;
  tr["M_t"] = cfg.train_M_t;
  tr["T"] = cfg.train_T;
  tr["dt"] = cfg.train_dt;
  tr["steps"] = cfg.train_steps;
  tr["learning_rate"] = cfg.learning_rate;
  tr["batch_size"] = cfg.batch_size;
  tr["hidden_width"] = cfg.hidden_width;
  tr["hidden_layers"] = cfg.hidden_layers;
  tr["n_latent"] = cfg.n_latent;

  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["mode"] = cfg.mode;
  j["chains"] = cfg.chains;
  j["target"] = std::move(t);
  j["sampler"] = std::move(s);
  j["train"] = std::move(tr);
  j["paths"] = {{"checkpoint", cfg.checkpoint_path}, {"output_dir", cfg.output_dir}};
  j["start"] = std::vector<double>(cfg.start.data(), cfg.start.data() + cfg.start.size());
  return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  using cli_detail::check_keys;
  using cli_detail::read_into;
  RunConfig cfg;
  check_keys(j, "config",
             {"seed", "mode", "chains", "target", "sampler", "train", "paths", "start"});
  read_into(j, "seed", cfg.seed);
  read_into(j, "mode", cfg.mode);
  read_into(j, "chains", cfg.chains);

  if (j.contains("target")) {
    const auto& t = j.at("target");
    check_keys(t, "target",
               {"name", "n", "eta", "diag", "dataset", "intercept", "synthetic",
                "synthetic_K", "synthetic_d", "synthetic_seed"});
    read_into(t, "name", cfg.target.name);
    std::int64_t n = cfg.target.n;
    read_into(t, "n", n);
    cfg.target.n = static_cast<Eigen::Index>(n);
    read_into(t, "eta", cfg.target.eta);
    if (t.contains("diag")) {
      const auto v = t.at("diag").get<std::vector<double>>();
      cfg.target.diag = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    read_into(t, "dataset", cfg.target.dataset_path);
    read_into(t, "intercept", cfg.target.intercept);
    read_into(t, "synthetic", cfg.target_synthetic);
    std::int64_t sk = cfg.target.synthetic_K, sd = cfg.target.synthetic_d;
    read_into(t, "synthetic_K", sk);
    read_into(t, "synthetic_d", sd);
    cfg.target.synthetic_K = static_cast<Eigen::Index>(sk);
    cfg.target.synthetic_d = static_cast<Eigen::Index>(sd);
    read_into(t, "synthetic_seed", cfg.target.synthetic_seed);
  }

  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    check_keys(s, "sampler",
               {"M", "burn_in", "dt", "T", "max_tree_depth", "delta_lf", "delta_hnn", "n_lf"});
    read_into(s, "M", cfg.sampler.M);
    read_into(s, "burn_in", cfg.sampler.burn_in);
    read_into(s, "dt", cfg.sampler.dt);
    read_into(s, "T", cfg.sampler.T);
    read_into(s, "max_tree_depth", cfg.sampler.max_tree_depth);
    if (s.contains("delta_lf"))
      cfg.sampler.delta_lf = cli_detail::threshold_from_json(s.at("delta_lf"), "sampler.delta_lf");
    if (s.contains("delta_hnn"))
      cfg.sampler.delta_hnn =
          cli_detail::threshold_from_json(s.at("delta_hnn"), "sampler.delta_hnn");
    read_into(s, "n_lf", cfg.sampler.n_lf);
  }

  if (j.contains("train")) {
    const auto& tr = j.at("train");
    check_keys(tr, "train",
               {"inline", "M_t", "T", "dt", "steps", "learning_rate", "batch_size",
                "hidden_width", "hidden_layers", "n_latent"});
    read_into(tr, "inline", cfg.train_inline);
    read_into(tr, "M_t", cfg.train_M_t);
    read_into(tr, "T", cfg.train_T);
    read_into(tr, "dt", cfg.train_dt);
    read_into(tr, "steps", cfg.train_steps);
    read_into(tr, "learning_rate", cfg.learning_rate);
    std::int64_t bs = cfg.batch_size, hw = cfg.hidden_width, hl = cfg.hidden_layers,
                 nl = cfg.n_latent;
    read_into(tr, "batch_size", bs);
    read_into(tr, "hidden_width", hw);
    read_into(tr, "hidden_layers", hl);
    read_into(tr, "n_latent", nl);
    cfg.batch_size = static_cast<Eigen::Index>(bs);
    cfg.hidden_width = static_cast<Eigen::Index>(hw);
    cfg.hidden_layers = static_cast<Eigen::Index>(hl);
    cfg.n_latent = static_cast<Eigen::Index>(nl);
  }

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    check_keys(p, "paths", {"checkpoint", "output_dir"});
    read_into(p, "checkpoint", cfg.checkpoint_path);
    read_into(p, "output_dir", cfg.output_dir);
  }

  if (j.contains("start")) {
    const auto v = j.at("start").get<std::vector<double>>();
    cfg.start = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return cfg;
}

inline nlohmann::json parse_config_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(parse_config_text(read_text_file(path)));
}

// Configuration errors name the offending field path.
inline void validate_run_config(const RunConfig& cfg) {
  static const std::set<std::string> kModes = {"hmc", "nuts", "lhnn-hmc", "lhnn-nuts"};
  if (!kModes.count(cfg.mode))
    throw ConfigError("mode: must be one of hmc | nuts | lhnn-hmc | lhnn-nuts");
  if (cfg.chains < 1) throw ConfigError("chains: must be >= 1");
  if (cfg.target.name.empty()) throw ConfigError("target.name: required");
  if (cfg.target.name == "logistic" && cfg.target.dataset_path.empty() && !cfg.target_synthetic)
    throw ConfigError(
        "target.dataset: required for the logistic target (or set target.synthetic: true)");
  if (mode_uses_network(cfg.mode) && cfg.checkpoint_path.empty() && !cfg.train_inline)
    throw ConfigError("paths.checkpoint: required for mode " + cfg.mode +
                      " (or set train.inline: true)");
  SamplerConfig s = cfg.sampler;
  s.seed = cfg.seed;
  s.validate();
}

// FNV-1a over the canonical dump; identifies the effective configuration in
// every output artifact.
inline std::string config_hash(const nlohmann::json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Output directory resolution: the LHNN_OUTPUT_DIR environment variable
// overrides the configured value; an explicit override (compare's per-run
// subdirectories) beats both.
inline std::string resolve_output_dir(const RunConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("LHNN_OUTPUT_DIR"); env != nullptr && *env != '\0')
    return env;
  return cfg.output_dir;
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

inline void write_chain_csv(const std::string& path, const Chain& chain) {
  std::vector<std::string> header;
  header.emplace_back("sample_index");
  for (Eigen::Index jcol = 0; jcol < chain.dim; ++jcol)
    header.push_back("q_" + std::to_string(jcol + 1));
  header.emplace_back("tree_depth");
  header.emplace_back("fallback_flag");
  header.emplace_back("epsilon");
  std::vector<std::vector<double>> rows;
  rows.reserve(chain.M);
  for (std::uint64_t m = 0; m < chain.M; ++m) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(chain.dim) + 4);
    row.push_back(static_cast<double>(m + 1));
    for (Eigen::Index jcol = 0; jcol < chain.dim; ++jcol)
      row.push_back(chain.samples(static_cast<Eigen::Index>(m), jcol));
    row.push_back(static_cast<double>(chain.tree_depth[m]));
    row.push_back(static_cast<double>(chain.fallback_flag[m]));
    row.push_back(chain.epsilon[m]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

inline nlohmann::json chain_detail_json(const Chain& chain) {
  nlohmann::json d;
  d["seed"] = chain.seed;
  d["M"] = chain.M;
  d["burn_in"] = chain.burn_in;
  d["accept_count"] = chain.accept_count;
  d["acceptance"] = chain.acceptance;
  d["fallback_samples"] = chain.fallback_samples;
  d["grads_training"] = chain.grads_training;
  d["grads_target_reported"] = chain.grads_target_reported;
  d["grads_target_actual"] = chain.grads_target_actual;
  d["grads_network_reported"] = chain.grads_network_reported;
  d["grads_network_actual"] = chain.grads_network_actual;
  d["target_bootstrap_evals"] = chain.target_bootstrap_evals;
  d["network_bootstrap_evals"] = chain.network_bootstrap_evals;
  d["potential_calls"] = chain.potential_calls;
  d["grads_evaluation"] = chain.grads_target_reported + chain.grads_network_reported;
  d["grads_total"] =
      chain.grads_training + chain.grads_target_reported + chain.grads_network_reported;
  return d;
}

inline nlohmann::json report_to_json(const EssReport& r, const nlohmann::json& config,
                                     std::uint64_t seed) {
  nlohmann::json j;
  j["dims"] = r.ess.size();
  j["ess"] = r.ess;
  j["ess_avg"] = r.ess_avg;
  j["lags"] = r.lags;
  j["grads_training"] = r.grads_training;
  j["grads_evaluation"] = r.grads_evaluation;
  j["grads_total"] = r.grads_total;
  j["ess_per_grad"] = r.ess_per_grad;
  j["acceptance"] = r.acceptance;
  j["fallback_samples"] = r.fallback_samples;
  j["config"] = config;
  j["seed"] = seed;
  return j;
}

// Fixed-width text rendering of an ESS report.
inline std::string report_table(const EssReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%4s %14s %8s\n", "dim", "ESS", "lag");
  out += line;
  for (std::size_t i = 0; i < r.ess.size(); ++i) {
    std::snprintf(line, sizeof(line), "%4zu %14.2f %8zu\n", i + 1, r.ess[i], r.lags[i]);
    out += line;
  }
  std::snprintf(line, sizeof(line), "avg ESS          %14.2f\n", r.ess_avg);
  out += line;
  std::snprintf(line, sizeof(line), "gradients        %llu training + %llu evaluation = %llu\n",
                static_cast<unsigned long long>(r.grads_training),
                static_cast<unsigned long long>(r.grads_evaluation),
                static_cast<unsigned long long>(r.grads_total));
  out += line;
  std::snprintf(line, sizeof(line), "ESS per gradient %14.6g\n", r.ess_per_grad);
  out += line;
  std::snprintf(line, sizeof(line), "acceptance       %14.4f\n", r.acceptance);
  out += line;
  std::snprintf(line, sizeof(line), "fallback samples %14llu\n",
                static_cast<unsigned long long>(r.fallback_samples));
  out += line;
  return out;
}

struct TrainOutputs {
  Checkpoint checkpoint;
  std::vector<std::pair<std::uint64_t, double>> curve;
  std::uint64_t grads_training_reported = 0;
  std::uint64_t grads_training_actual = 0;
  std::string checkpoint_path;
  std::string curve_path;
  std::string summary_path;
};

// train: generate Hamilton's-equations data with HMC, fit the network, and
// write checkpoint + training-curve CSV + JSON summary.
inline TrainOutputs cmd_train(const RunConfig& cfg, const std::string& override_dir = "") {
  if (cfg.target.name.empty()) throw ConfigError("target.name: required");
  if (cfg.target.name == "logistic" && cfg.target.dataset_path.empty() && !cfg.target_synthetic)
    throw ConfigError(
        "target.dataset: required for the logistic target (or set target.synthetic: true)");
  const TargetDensity target = make_target(cfg.target);
  const std::string dir = resolve_output_dir(cfg, override_dir);
  ensure_dir(dir);

  TrainingSet data =
      generate_training_data(target, cfg.train_M_t, cfg.train_T, cfg.train_dt, cfg.seed);
  Architecture arch;
  arch.input_dim = 2 * target.dim;
  arch.hidden_width = cfg.hidden_width;
  arch.hidden_layers = cfg.hidden_layers;
  arch.n_latent = cfg.n_latent > 0 ? cfg.n_latent : target.dim;
  TrainConfig tc;
  tc.steps = cfg.train_steps;
  tc.learning_rate = cfg.learning_rate;
  tc.batch_size = cfg.batch_size;
  tc.seed = cfg.seed;
  TrainResult res = train(data, tc, arch);

  TrainOutputs out;
  out.grads_training_reported = data.gradients_reported;
  out.grads_training_actual = data.gradients_actual;
  out.checkpoint.params = std::move(res.params);
  out.checkpoint.meta.target_name = cfg.target.name;
  out.checkpoint.meta.gradients_reported = data.gradients_reported;
  out.checkpoint.meta.gradients_actual = data.gradients_actual;
  out.checkpoint.meta.train_steps = tc.steps;
  out.checkpoint.meta.learning_rate = tc.learning_rate;
  out.checkpoint.meta.batch_size = tc.batch_size;
  out.checkpoint.meta.seed = cfg.seed;
  out.checkpoint.meta.initial_loss = res.initial_loss;
  out.checkpoint.meta.final_loss = res.final_loss;
  out.curve = std::move(res.curve);

  out.checkpoint_path =
      cfg.checkpoint_path.empty() ? dir + "/checkpoint.json" : cfg.checkpoint_path;
  save_checkpoint(out.checkpoint_path, out.checkpoint);

  out.curve_path = dir + "/training_curve.csv";
  {
    std::vector<std::vector<double>> rows;
    rows.reserve(out.curve.size());
    for (const auto& [step, loss] : out.curve)
      rows.push_back({static_cast<double>(step), loss});
    write_csv(out.curve_path, {"step", "loss"}, rows);
  }

  const nlohmann::json cfg_json = run_config_to_json(cfg);
  nlohmann::json summary;
  summary["command"] = "train";
  summary["config"] = cfg_json;
  summary["config_hash"] = config_hash(cfg_json);
  summary["seed"] = cfg.seed;
  summary["target"] = {{"name", cfg.target.name}, {"dim", target.dim}};
  summary["grads_training"] = data.gradients_reported;
  summary["grads_training_actual"] = data.gradients_actual;
  summary["initial_loss"] = out.checkpoint.meta.initial_loss;
  summary["final_loss"] = out.checkpoint.meta.final_loss;
  summary["checkpoint"] = out.checkpoint_path;
  out.summary_path = dir + "/train_summary.json";
  write_text_file(out.summary_path, summary.dump(2) + "\n");
  return out;
}

struct SampleOutputs {
  std::vector<Chain> chains;
  std::vector<std::string> chain_paths;
  std::string summary_path;
  nlohmann::json summary;
  std::uint64_t grads_training = 0;
};

// sample: run the configured sampler; writes chain.csv (chain_k.csv for
// additional chains) and summary.json. Deterministic per seed: rerunning the
// same effective config produces byte-identical files.
inline SampleOutputs cmd_sample(const RunConfig& cfg, const std::string& override_dir = "") {
  validate_run_config(cfg);
  const TargetDensity target = make_target(cfg.target);
  const Eigen::Index d = target.dim;
  const std::string dir = resolve_output_dir(cfg, override_dir);
  ensure_dir(dir);

  SampleOutputs out;
  std::shared_ptr<const NetworkParams> net;
  if (mode_uses_network(cfg.mode)) {
    if (!cfg.checkpoint_path.empty()) {
      Checkpoint ck = load_checkpoint(cfg.checkpoint_path);
      if (ck.params.arch.input_dim != 2 * d)
        throw ConfigError("paths.checkpoint: network input dimension " +
                          std::to_string(ck.params.arch.input_dim) + " does not match 2 x " +
                          std::to_string(d));
      out.grads_training = ck.meta.gradients_reported;
      net = std::make_shared<const NetworkParams>(std::move(ck.params));
    } else {
      // Inline training block: fit in-process and fold the training
      // gradients into this run's accounting.
      TrainingSet data =
          generate_training_data(target, cfg.train_M_t, cfg.train_T, cfg.train_dt, cfg.seed);
      Architecture arch;
      arch.input_dim = 2 * d;
      arch.hidden_width = cfg.hidden_width;
      arch.hidden_layers = cfg.hidden_layers;
      arch.n_latent = cfg.n_latent > 0 ? cfg.n_latent : d;
      TrainConfig tc;
      tc.steps = cfg.train_steps;
      tc.learning_rate = cfg.learning_rate;
      tc.batch_size = cfg.batch_size;
      tc.seed = cfg.seed;
      TrainResult res = train(data, tc, arch);
      out.grads_training = data.gradients_reported;
      net = std::make_shared<const NetworkParams>(std::move(res.params));
    }
  }

  Vec start;
  if (cfg.start.size() > 0) {
    if (cfg.start.size() != d)
      throw ConfigError("start: length " + std::to_string(cfg.start.size()) +
                        " does not match target dimension " + std::to_string(d));
    start = cfg.start;
  } else {
    start = Vec::Zero(d);
  }

  const GradientProvider provider =
      net ? network_provider(net) : analytic_provider(target);
  nlohmann::json chains_json = nlohmann::json::array();
  for (std::uint64_t k = 0; k < cfg.chains; ++k) {
    SamplerConfig sc = cfg.sampler;
    sc.seed = derive_subseed(cfg.seed, k);
    Chain chain = mode_is_tree(cfg.mode) ? nuts(provider, target, sc, start)
                                         : hmc(provider, target, sc, start);
    chain.grads_training = out.grads_training;
    const std::string name = k == 0 ? "chain.csv" : "chain_" + std::to_string(k) + ".csv";
    const std::string path = dir + "/" + name;
    write_chain_csv(path, chain);
    nlohmann::json cj = chain_detail_json(chain);
    cj["csv"] = name;
    cj["chain_index"] = k;
    chains_json.push_back(std::move(cj));
    out.chains.push_back(std::move(chain));
    out.chain_paths.push_back(path);
  }

  const nlohmann::json cfg_json = run_config_to_json(cfg);
  nlohmann::json summary;
  summary["command"] = "sample";
  summary["config"] = cfg_json;
  summary["config_hash"] = config_hash(cfg_json);
  summary["seed"] = cfg.seed;
  summary["mode"] = cfg.mode;
  summary["dims"] = d;
  summary["target"] = {{"name", cfg.target.name}, {"dim", d}};
  summary["grads_training"] = out.grads_training;
  summary["chains"] = std::move(chains_json);
  out.summary = summary;
  out.summary_path = dir + "/summary.json";
  write_text_file(out.summary_path, summary.dump(2) + "\n");
  return out;
}

struct CompareOutputs {
  SampleOutputs a;
  SampleOutputs b;
  EssReport report_a;
  EssReport report_b;
  std::vector<double> ks;  // per dimension, post-burn-in, chain 0 vs chain 0
  double ess_per_grad_ratio = 0.0;
  double gradient_reduction = 0.0;
  std::string summary_path;
  nlohmann::json summary;
};

// compare: run A (the baseline) and B, then report per-dimension ESS, KS
// distances between the two post-burn-in sample sets, the ESS-per-gradient
// ratio B/A, and the gradient reduction 1 - total_B / total_A.
inline CompareOutputs cmd_compare(const RunConfig& cfg_a, const RunConfig& cfg_b,
                                  const std::string& override_dir = "") {
  const std::string dir = resolve_output_dir(cfg_a, override_dir);
  ensure_dir(dir);
  CompareOutputs out;
  out.a = cmd_sample(cfg_a, dir + "/a");
  out.b = cmd_sample(cfg_b, dir + "/b");
  const Chain& ca = out.a.chains.front();
  const Chain& cb = out.b.chains.front();
  if (ca.dim != cb.dim)
    throw ConfigError("compare: chain dimensions disagree (" + std::to_string(ca.dim) +
                      " vs " + std::to_string(cb.dim) + ")");

  out.report_a = report(ca);
  out.report_b = report(cb);
  const Mat post_a = ca.post_burn_in();
  const Mat post_b = cb.post_burn_in();
  out.ks.reserve(static_cast<std::size_t>(ca.dim));
  for (Eigen::Index jcol = 0; jcol < ca.dim; ++jcol)
    out.ks.push_back(ks_distance(post_a.col(jcol), post_b.col(jcol)));
  out.ess_per_grad_ratio = out.report_a.ess_per_grad > 0.0
                               ? out.report_b.ess_per_grad / out.report_a.ess_per_grad
                               : 0.0;
  out.gradient_reduction =
      out.report_a.grads_total > 0
          ? 1.0 - static_cast<double>(out.report_b.grads_total) /
                      static_cast<double>(out.report_a.grads_total)
          : 0.0;

  const nlohmann::json ja = run_config_to_json(cfg_a);
  const nlohmann::json jb = run_config_to_json(cfg_b);
  nlohmann::json summary;
  summary["command"] = "compare";
  summary["a"] = report_to_json(out.report_a, ja, cfg_a.seed);
  summary["a"]["config_hash"] = config_hash(ja);
  summary["b"] = report_to_json(out.report_b, jb, cfg_b.seed);
  summary["b"]["config_hash"] = config_hash(jb);
  summary["ks"] = out.ks;
  summary["ess_per_grad_ratio"] = out.ess_per_grad_ratio;
  summary["gradient_reduction"] = out.gradient_reduction;
  out.summary = summary;
  out.summary_path = dir + "/compare.json";
  write_text_file(out.summary_path, summary.dump(2) + "\n");
  return out;
}

struct EssArgs {
  std::string chain_csv;
  std::uint64_t burn_in = 0;
  std::uint64_t grads_training = 0;
  std::uint64_t grads_evaluation = 0;
  std::string output_dir = ".";
};

struct EssOutputs {
  EssReport rep;
  std::string table;
  std::string json_path;
};

// ess: per-dimension effective sample size of a stored chain CSV.
inline EssOutputs cmd_ess(const EssArgs& args) {
  const CsvTable tab = read_csv(args.chain_csv);
  std::vector<std::size_t> qcols;
  std::size_t fallback_col = tab.header.size();
  for (std::size_t c = 0; c < tab.header.size(); ++c) {
    if (tab.header[c].rfind("q_", 0) == 0) qcols.push_back(c);
    if (tab.header[c] == "fallback_flag") fallback_col = c;
  }
  if (qcols.empty())
    throw ParseError("ess: no q_* columns in " + args.chain_csv +
                     " (a header row is required)");
  const std::size_t rows = tab.rows.size();
  if (args.burn_in >= rows) throw ConfigError("burn_in: must be smaller than the chain length");

  Chain chain;
  chain.dim = static_cast<Eigen::Index>(qcols.size());
  chain.M = rows;
  chain.burn_in = args.burn_in;
  chain.samples.resize(static_cast<Eigen::Index>(rows), chain.dim);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < qcols.size(); ++c)
      chain.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          tab.rows[r][qcols[c]];
  if (fallback_col < tab.header.size())
    for (std::size_t r = 0; r < rows; ++r)
      if (tab.rows[r][fallback_col] != 0.0) ++chain.fallback_samples;
  chain.grads_training = args.grads_training;
  chain.grads_target_reported = args.grads_evaluation;

  EssOutputs out;
  out.rep = report(chain);
  out.table = report_table(out.rep);
  ensure_dir(args.output_dir);
  nlohmann::json config;
  config["chain"] = args.chain_csv;
  config["burn_in"] = args.burn_in;
  out.json_path = args.output_dir + "/ess_report.json";
  write_text_file(out.json_path, report_to_json(out.rep, config, 0).dump(2) + "\n");
  return out;
}

}  // namespace lhnn
