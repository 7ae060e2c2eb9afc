#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lhnn/integrate.hpp"
#include "lhnn/loss.hpp"
#include "lhnn/rng.hpp"

namespace lhnn {

// Shared sampler settings. delta_lf and delta_hnn are the stop thresholds for
// the monitored error H(q', p') + log u; n_lf is how many subsequent samples
// stay on target-gradient leapfrog after the monitor trips.
struct SamplerConfig {
  std::uint64_t M = 10000;
  std::uint64_t burn_in = 0;
  double dt = 0.025;
  double T = 5.0;                 // trajectory end time (fixed-length runs)
  std::uint64_t max_tree_depth = 10;  // tree-based runs
  double delta_lf = 1000.0;
  double delta_hnn = 10.0;
  std::uint64_t n_lf = 20;
  std::uint64_t seed = 1;
  std::optional<MassVector> mass;  // default: all ones

  void validate() const {
    if (!(M > burn_in)) throw ConfigError("SamplerConfig: need M > burn_in >= 0");
    if (!(dt > 0.0)) throw ConfigError("SamplerConfig: dt must be positive");
    if (std::isnan(delta_lf) || std::isnan(delta_hnn) || !(delta_hnn <= delta_lf))
      throw ConfigError("SamplerConfig: thresholds must satisfy delta_hnn <= delta_lf");
    if (n_lf < 1) throw ConfigError("SamplerConfig: n_lf must be >= 1");
    if (max_tree_depth < 1) throw ConfigError("SamplerConfig: max_tree_depth must be >= 1");
  }

  MassVector mass_for(Eigen::Index d) const {
    if (!mass) return MassVector::ones(d);
    if (mass->dim() != d) throw ConfigError("SamplerConfig: mass length does not match target");
    return *mass;
  }
};

// Ordered posterior samples plus acceptance statistics, per-sample tree and
// fallback bookkeeping, and gradient accounting. Burn-in rows are retained in
// `samples`; consumers flag them via `burn_in`. The *_reported figures follow
// the convention of one gradient per leapfrog step (what benchmark tables
// tally); the *_actual figures are raw counter deltas over the run, which
// additionally include cache bootstraps (first gradient of a chain, and
// re-evaluations where the fallback switches the gradient source at a point
// whose cached gradient came from the other source).
struct Chain {
  Mat samples;  // M x d
  Eigen::Index dim = 0;
  std::uint64_t M = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;

  std::vector<std::uint64_t> tree_depth;  // zero for fixed-length runs
  std::vector<int> fallback_flag;  // tree runs: monitor active; fixed-length runs: non-finite reject
  std::vector<double> epsilon;     // tree runs: max (H + log u); fixed-length runs: H_new - H_old

  std::uint64_t accept_count = 0;
  double acceptance = 0.0;

  std::uint64_t grads_training = 0;            // filled from a checkpoint by the CLI
  std::uint64_t grads_target_reported = 0;     // target-gradient leapfrog steps
  std::uint64_t grads_target_actual = 0;       // target gradient-counter delta
  std::uint64_t grads_network_reported = 0;    // network leapfrog steps
  std::uint64_t grads_network_actual = 0;      // network provider counter delta
  std::uint64_t target_bootstrap_evals = 0;    // actual minus reported, target side
  std::uint64_t network_bootstrap_evals = 0;   // actual minus reported, network side
  std::uint64_t potential_calls = 0;           // target potential-counter delta
  std::uint64_t fallback_samples = 0;

  Mat post_burn_in() const {
    return samples.bottomRows(static_cast<Eigen::Index>(M - burn_in));
  }
};

// Fixed-length Hamiltonian Monte Carlo over any gradient provider.
//
// Per iteration: draw p(0) with independent N(0, m_i) components, integrate
// T/dt leapfrog steps under the provider, and accept with probability
// min{1, exp(H_old - H_new)} where H is always the true target Hamiltonian
// (2 potential calls per iteration; the provider supplies only gradients).
// A non-finite H or a failed integration rejects the sample, sets its
// fallback_flag, and the chain continues.
//
// Gradient accounting: the provider gradient is cached across iterations (the
// accepted endpoint's gradient, or the retained start gradient on rejection),
// so a run consumes exactly M * (T/dt) + 1 provider calls; the reported
// figure counts the M * (T/dt) steps and the +1 is the bootstrap.
//
// Seeded stream, consumed in this order per iteration: d normals for the
// momentum (two uniforms each), then one uniform for the Metropolis test.
// Nothing else draws. On integration failure or non-finite H the Metropolis
// uniform is not consumed.
inline Chain hmc(const GradientProvider& grad, const TargetDensity& target,
                 const SamplerConfig& cfg, const Vec& start) {
  cfg.validate();
  if (start.size() != target.dim || grad.dim != target.dim)
    throw DimensionError("hmc: start/provider/target dimensions disagree");
  const Eigen::Index d = target.dim;
  const MassVector mass = cfg.mass_for(d);
  const auto steps = static_cast<std::uint64_t>(std::llround(cfg.T / cfg.dt));
  if (steps < 1) throw ConfigError("hmc: T/dt must round to at least one step");

  const std::uint64_t pot0 = target.potential_calls->load();
  const std::uint64_t tgrad0 = target.gradient_calls->load();
  const std::uint64_t prov0 = grad.calls->load();

  RandomEngine rng(cfg.seed);
  Chain chain;
  chain.dim = d;
  chain.M = cfg.M;
  chain.burn_in = cfg.burn_in;
  chain.seed = cfg.seed;
  chain.samples.resize(static_cast<Eigen::Index>(cfg.M), d);
  chain.tree_depth.assign(cfg.M, 0);
  chain.fallback_flag.assign(cfg.M, 0);
  chain.epsilon.assign(cfg.M, 0.0);

  Vec q = start;
  std::optional<Vec> cached;  // provider gradient at q
  for (std::uint64_t m = 0; m < cfg.M; ++m) {
    Vec p(d);
    for (Eigen::Index i = 0; i < d; ++i) p[i] = std::sqrt(mass.m[i]) * rng.normal();
    const double h_old = potential(target, q) + kinetic(p, mass);
    bool accepted = false;
    bool flagged = false;
    double eps = 0.0;
    try {
      Trajectory traj = integrate(PhaseState(q, p), steps, cfg.dt, mass, grad, cached);
      const PhaseState& end = traj.states.back();
      const double u_new = potential(target, end.q);
      const double h_new = u_new + kinetic(end.p, mass);
      if (std::isfinite(h_new)) {
        eps = h_new - h_old;
        const double alpha = std::min(1.0, std::exp(h_old - h_new));
        if (rng.uniform01() <= alpha) {
          accepted = true;
          q = end.q;
          cached = traj.grads.back();
        } else {
          cached = traj.grads.front();
        }
      } else {
        flagged = true;
        cached = traj.grads.front();
      }
    } catch (const IntegrationError&) {
      flagged = true;  // reject and continue; the entry gradient stays valid
    } catch (const NumericalDomainError&) {
      flagged = true;
    }
    chain.samples.row(static_cast<Eigen::Index>(m)) = q.transpose();
    chain.fallback_flag[m] = flagged ? 1 : 0;
    chain.epsilon[m] = eps;
    if (accepted) ++chain.accept_count;
  }

  chain.acceptance = static_cast<double>(chain.accept_count) / static_cast<double>(cfg.M);
  chain.potential_calls = target.potential_calls->load() - pot0;
  chain.grads_target_actual = target.gradient_calls->load() - tgrad0;
  const std::uint64_t provider_delta = grad.calls->load() - prov0;
  // Failed trajectories cut the run short of the reported convention, so the
  // bootstrap figure (actual minus reported) saturates at zero.
  if (grad.kind == ProviderKind::analytic) {
    chain.grads_target_reported = cfg.M * steps;
    chain.target_bootstrap_evals =
        chain.grads_target_actual >= chain.grads_target_reported
            ? chain.grads_target_actual - chain.grads_target_reported
            : 0;
  } else {
    chain.grads_network_reported = cfg.M * steps;
    chain.grads_network_actual = provider_delta;
    chain.network_bootstrap_evals = provider_delta >= chain.grads_network_reported
                                        ? provider_delta - chain.grads_network_reported
                                        : 0;
  }
  return chain;
}

// Runs M_t fixed-length HMC iterations with analytic target gradients from
// the zero vector and stores every newly visited trajectory state (the N
// post-initial states of each trajectory, whether or not the endpoint is
// accepted) as a training row with exact Hamilton's-equations targets
// dq/dt = p ./ m and dp/dt = -grad U(q), reusing the gradients the
// integrator already computed. Stored rows and the reported gradient figure
// are both M_t * (T/dt); the actual counter delta is one higher (the
// bootstrap gradient at the origin), and generation checks that equality.
// Unit mass throughout; the RNG stream matches hmc's.
inline TrainingSet generate_training_data(const TargetDensity& target, std::uint64_t M_t,
                                          double T, double dt, std::uint64_t seed) {
  if (M_t < 1) throw ConfigError("generate_training_data: M_t must be >= 1");
  if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("generate_training_data: need T, dt > 0");
  const auto steps = static_cast<std::uint64_t>(std::llround(T / dt));
  if (steps < 1) throw ConfigError("generate_training_data: T/dt must round to at least one step");

  const Eigen::Index d = target.dim;
  const MassVector mass = MassVector::ones(d);
  GradientProvider provider = analytic_provider(target);
  const std::uint64_t tgrad0 = target.gradient_calls->load();

  RandomEngine rng(seed);
  TrainingSet data;
  const Eigen::Index rows = static_cast<Eigen::Index>(M_t * steps);
  data.inputs.resize(rows, 2 * d);
  data.targets.resize(rows, 2 * d);

  Vec q = Vec::Zero(d);
  std::optional<Vec> cached;
  Eigen::Index row = 0;
  for (std::uint64_t m = 0; m < M_t; ++m) {
    Vec p(d);
    for (Eigen::Index i = 0; i < d; ++i) p[i] = rng.normal();
    const double h_old = potential(target, q) + kinetic(p, mass);
    Trajectory traj = integrate(PhaseState(q, p), steps, dt, mass, provider, cached);
    for (std::uint64_t k = 1; k <= steps; ++k) {
      const PhaseState& z = traj.states[k];
      data.inputs.row(row).head(d) = z.q.transpose();
      data.inputs.row(row).tail(d) = z.p.transpose();
      data.targets.row(row).head(d) = z.p.transpose();  // dq/dt = p with unit mass
      data.targets.row(row).tail(d) = -traj.grads[k].transpose();
      ++row;
    }
    const PhaseState& end = traj.states.back();
    const double h_new = potential(target, end.q) + kinetic(end.p, mass);
    const double alpha = std::min(1.0, std::exp(h_old - h_new));
    if (rng.uniform01() <= alpha) {
      q = end.q;
      cached = traj.grads.back();
    } else {
      cached = traj.grads.front();
    }
  }

  data.gradients_reported = M_t * steps;
  data.gradients_actual = target.gradient_calls->load() - tgrad0;
  if (data.gradients_actual != data.gradients_reported + 1)
    throw TrainingError("generate_training_data: gradient accounting drifted (actual " +
                        std::to_string(data.gradients_actual) + ", stored rows " +
                        std::to_string(data.gradients_reported) + ")");

  // Spot-check stored targets against fresh evaluations. This runs after the
  // accounting window closes, so the counters above stay exact.
  for (int check = 0; check < 3; ++check) {
    const auto r = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(rows)));
    const Vec qi = data.inputs.row(r).head(d).transpose();
    const Vec pi = data.inputs.row(r).tail(d).transpose();
    if ((data.targets.row(r).head(d).transpose() - pi).norm() != 0.0 ||
        (data.targets.row(r).tail(d).transpose() + grad_potential(target, qi)).norm() != 0.0)
      throw TrainingError("generate_training_data: stored derivatives disagree with the target");
  }
  validate_training_set(data);
  return data;
}

}  // namespace lhnn
