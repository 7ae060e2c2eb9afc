// Command-line front end: train | sample | compare | ess subcommands over
// JSON run configs, with flag overrides applied on top of the file values.
// Exit codes: 0 success, 2 config/parse error, 3 numerical failure, 4 I/O.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lhnn/cli.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const std::string& cell : lhnn::split_csv_line(text)) {
    double v = 0.0;
    if (!lhnn::parse_double_cell(cell, v))
      throw lhnn::ConfigError(flag + ": expected a comma-separated list of numbers, got '" +
                              text + "'");
    out.push_back(v);
  }
  return out;
}

double parse_threshold_flag(const std::string& text, const std::string& flag) {
  double v = 0.0;
  if (!lhnn::parse_double_cell(text, v))
    throw lhnn::ConfigError(flag + ": expected a number, 'inf', or '-inf', got '" + text + "'");
  return v;
}

// Flag overrides collected per subcommand; only values the user actually
// passed are written over the config file's JSON.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> chains;
  std::optional<std::string> target_name;
  std::optional<std::int64_t> n;
  std::optional<double> eta;
  std::optional<std::string> diag;
  std::optional<std::string> dataset;
  bool intercept = false;
  bool synthetic = false;
  std::optional<std::uint64_t> M;
  std::optional<std::uint64_t> burn_in;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<std::uint64_t> max_tree_depth;
  std::optional<std::string> delta_lf;
  std::optional<std::string> delta_hnn;
  std::optional<std::uint64_t> n_lf;
  bool train_inline = false;
  std::optional<std::uint64_t> M_t;
  std::optional<double> train_T;
  std::optional<double> train_dt;
  std::optional<std::uint64_t> train_steps;
  std::optional<double> learning_rate;
  std::optional<std::int64_t> batch_size;
  std::optional<std::int64_t> hidden_width;
  std::optional<std::int64_t> hidden_layers;
  std::optional<std::int64_t> n_latent;
  std::optional<std::string> checkpoint;
  std::optional<std::string> output_dir;
  std::optional<std::string> start;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed; every stream derives from it");
  cmd->add_option("--mode", o.mode, "hmc | nuts | lhnn-hmc | lhnn-nuts");
  cmd->add_option("--chains", o.chains, "Number of independent chains");
  cmd->add_option("--target", o.target_name, "Density name");
  cmd->add_option("--n", o.n, "Target dimension (where applicable)");
  cmd->add_option("--eta", o.eta, "rough_well ripple scale");
  cmd->add_option("--diag", o.diag, "ill_conditioned_gaussian variances, comma-separated");
  cmd->add_option("--dataset", o.dataset, "logistic dataset CSV path");
  cmd->add_flag("--intercept", o.intercept, "logistic: append an all-ones column");
  cmd->add_flag("--synthetic", o.synthetic, "logistic: use the built-in synthetic dataset");
  cmd->add_option("--M", o.M, "Sample count");
  cmd->add_option("--burn-in", o.burn_in, "Burn-in sample count");
  cmd->add_option("--dt", o.dt, "Leapfrog step size");
  cmd->add_option("--T", o.T, "Trajectory end time (hmc modes)");
  cmd->add_option("--max-tree-depth", o.max_tree_depth, "Tree doubling cap (nuts modes)");
  cmd->add_option("--delta-lf", o.delta_lf, "Leapfrog stop threshold");
  cmd->add_option("--delta-hnn", o.delta_hnn, "Network stop threshold ('-inf' forces fallback)");
  cmd->add_option("--n-lf", o.n_lf, "Samples kept on fallback after a monitor trip");
  cmd->add_flag("--train-inline", o.train_inline, "lhnn-*: train in-process instead of loading");
  cmd->add_option("--M-t", o.M_t, "Training data: HMC iterations");
  cmd->add_option("--train-T", o.train_T, "Training data: trajectory end time");
  cmd->add_option("--train-dt", o.train_dt, "Training data: step size");
  cmd->add_option("--train-steps", o.train_steps, "Optimizer steps");
  cmd->add_option("--learning-rate", o.learning_rate, "Adam learning rate");
  cmd->add_option("--batch-size", o.batch_size, "Minibatch size");
  cmd->add_option("--hidden-width", o.hidden_width, "Hidden layer width");
  cmd->add_option("--hidden-layers", o.hidden_layers, "Hidden layer count");
  cmd->add_option("--n-latent", o.n_latent, "Latent output count (0 = target dimension)");
  cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint path");
  cmd->add_option("--output-dir", o.output_dir, "Output directory");
  cmd->add_option("--start", o.start, "Starting position, comma-separated");
}

void apply_overrides(nlohmann::json& j, const Overrides& o) {
  if (o.seed) j["seed"] = *o.seed;
  if (o.mode) j["mode"] = *o.mode;
  if (o.chains) j["chains"] = *o.chains;
  if (o.target_name) j["target"]["name"] = *o.target_name;
  if (o.n) j["target"]["n"] = *o.n;
  if (o.eta) j["target"]["eta"] = *o.eta;
  if (o.diag) j["target"]["diag"] = parse_double_list(*o.diag, "--diag");
  if (o.dataset) j["target"]["dataset"] = *o.dataset;
  if (o.intercept) j["target"]["intercept"] = true;
  if (o.synthetic) j["target"]["synthetic"] = true;
  if (o.M) j["sampler"]["M"] = *o.M;
  if (o.burn_in) j["sampler"]["burn_in"] = *o.burn_in;
  if (o.dt) j["sampler"]["dt"] = *o.dt;
  if (o.T) j["sampler"]["T"] = *o.T;
  if (o.max_tree_depth) j["sampler"]["max_tree_depth"] = *o.max_tree_depth;
  if (o.delta_lf)
    j["sampler"]["delta_lf"] =
        lhnn::cli_detail::threshold_to_json(parse_threshold_flag(*o.delta_lf, "--delta-lf"));
  if (o.delta_hnn)
    j["sampler"]["delta_hnn"] =
        lhnn::cli_detail::threshold_to_json(parse_threshold_flag(*o.delta_hnn, "--delta-hnn"));
  if (o.n_lf) j["sampler"]["n_lf"] = *o.n_lf;
  if (o.train_inline) j["train"]["inline"] = true;
  if (o.M_t) j["train"]["M_t"] = *o.M_t;
  if (o.train_T) j["train"]["T"] = *o.train_T;
  if (o.train_dt) j["train"]["dt"] = *o.train_dt;
  if (o.train_steps) j["train"]["steps"] = *o.train_steps;
  if (o.learning_rate) j["train"]["learning_rate"] = *o.learning_rate;
  if (o.batch_size) j["train"]["batch_size"] = *o.batch_size;
  if (o.hidden_width) j["train"]["hidden_width"] = *o.hidden_width;
  if (o.hidden_layers) j["train"]["hidden_layers"] = *o.hidden_layers;
  if (o.n_latent) j["train"]["n_latent"] = *o.n_latent;
  if (o.checkpoint) j["paths"]["checkpoint"] = *o.checkpoint;
  if (o.output_dir) j["paths"]["output_dir"] = *o.output_dir;
  if (o.start) j["start"] = parse_double_list(*o.start, "--start");
}

lhnn::RunConfig build_config(const std::string& config_path, const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) j = lhnn::parse_config_text(lhnn::read_text_file(config_path));
  apply_overrides(j, o);
  return lhnn::run_config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian and no-u-turn samplers with latent-network surrogate gradients"};
  app.require_subcommand(1);

  std::string train_config, sample_config;
  Overrides train_over, sample_over;
  CLI::App* cmd_train = app.add_subcommand("train", "Generate training data and fit a network");
  cmd_train->add_option("--config", train_config, "JSON run config");
  add_override_flags(cmd_train, train_over);

  CLI::App* cmd_sample = app.add_subcommand("sample", "Run the configured sampler");
  cmd_sample->add_option("--config", sample_config, "JSON run config");
  add_override_flags(cmd_sample, sample_over);

  std::string compare_a, compare_b, compare_dir;
  CLI::App* cmd_compare = app.add_subcommand("compare", "Run two configs and compare chains");
  cmd_compare->add_option("--config-a", compare_a, "Baseline run config")->required();
  cmd_compare->add_option("--config-b", compare_b, "Comparison run config")->required();
  cmd_compare->add_option("--output-dir", compare_dir, "Output directory");

  lhnn::EssArgs ess_args;
  CLI::App* cmd_ess = app.add_subcommand("ess", "Effective sample size of a stored chain");
  cmd_ess->add_option("--chain", ess_args.chain_csv, "Chain CSV path")->required();
  cmd_ess->add_option("--burn-in", ess_args.burn_in, "Rows to exclude from the front");
  cmd_ess->add_option("--grads-training", ess_args.grads_training, "Training gradient count");
  cmd_ess->add_option("--grads-evaluation", ess_args.grads_evaluation,
                      "Evaluation gradient count");
  cmd_ess->add_option("--output-dir", ess_args.output_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_train->parsed()) {
      const lhnn::TrainOutputs out = lhnn::cmd_train(build_config(train_config, train_over));
      std::cout << "checkpoint: " << out.checkpoint_path << "\n"
                << "training gradients: " << out.grads_training_reported << "\n"
                << "loss: " << out.checkpoint.meta.initial_loss << " -> "
                << out.checkpoint.meta.final_loss << "\n"
                << "summary: " << out.summary_path << "\n";
    } else if (cmd_sample->parsed()) {
      const lhnn::SampleOutputs out = lhnn::cmd_sample(build_config(sample_config, sample_over));
      for (std::size_t k = 0; k < out.chains.size(); ++k)
        std::cout << "chain " << k << ": " << out.chain_paths[k]
                  << " acceptance " << out.chains[k].acceptance
                  << " fallback " << out.chains[k].fallback_samples << "\n";
      std::cout << "summary: " << out.summary_path << "\n";
    } else if (cmd_compare->parsed()) {
      const lhnn::CompareOutputs out = lhnn::cmd_compare(
          lhnn::load_run_config(compare_a), lhnn::load_run_config(compare_b), compare_dir);
      double ks_max = 0.0;
      for (const double k : out.ks) ks_max = std::max(ks_max, k);
      std::cout << "gradient reduction: " << out.gradient_reduction << "\n"
                << "ess per gradient ratio (b/a): " << out.ess_per_grad_ratio << "\n"
                << "max KS distance: " << ks_max << "\n"
                << "summary: " << out.summary_path << "\n";
    } else if (cmd_ess->parsed()) {
      const lhnn::EssOutputs out = lhnn::cmd_ess(ess_args);
      std::cout << out.table << "report: " << out.json_path << "\n";
    }
    return 0;
  } catch (const lhnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lhnn::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const lhnn::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
