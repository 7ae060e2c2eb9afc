#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

#include "lhnn/samplers.hpp"

namespace lhnn {

namespace nuts_detail {

enum class GradTag { none, target, network };

// Tree endpoint carrying its cached provider gradient. Gradients depend on
// position only (the network field is evaluated at zero momentum), so a
// cached value stays valid for as long as the point does; the tag records
// which source produced it.
struct TreePoint {
  Vec q;
  Vec p;
  Vec grad;
  GradTag tag = GradTag::none;
};

struct TreeState {
  TreePoint minus;     // outermost point in the backward direction
  TreePoint plus;      // outermost point in the forward direction
  TreePoint proposal;  // candidate next sample drawn from this subtree
  std::uint64_t n = 0;          // count of slice-admissible states
  int s = 0;                    // continue flag
  int lf = 0;                   // monitor flag threaded through the recursion
  double log_u = 0.0;           // slice variable, log domain
  double err_max = -std::numeric_limits<double>::infinity();
};

inline bool no_uturn(const TreePoint& minus, const TreePoint& plus) {
  const Vec dq = plus.q - minus.q;
  return dq.dot(minus.p) >= 0.0 && dq.dot(plus.p) >= 0.0;
}

// Shared machinery for one chain. steps_* count successful leapfrog steps by
// gradient source (the reported figures); *_boot count cache bootstraps, the
// evaluations at a tree entry point whose cached gradient is missing or came
// from the other source. On clean runs the raw counter deltas equal
// steps + boots per source.
struct TreeContext {
  const TargetDensity& target;
  const MassVector& mass;
  const GradientProvider& target_prov;
  const GradientProvider* net_prov;  // null in traditional mode
  const SamplerConfig& cfg;
  RandomEngine& rng;
  bool monitored;
  std::uint64_t steps_target = 0;
  std::uint64_t steps_network = 0;
  std::uint64_t target_boot = 0;
  std::uint64_t network_boot = 0;

  // One leapfrog step of signed size from an entry point; returns the new
  // point and its true Hamiltonian, or nothing when the step or the
  // Hamiltonian leaves the finite range.
  std::optional<std::pair<TreePoint, double>> try_step(const TreePoint& from, int dir,
                                                       bool use_target) {
    const GradientProvider& prov = use_target ? target_prov : *net_prov;
    const GradTag want = use_target ? GradTag::target : GradTag::network;
    try {
      Vec g0;
      if (from.tag == want) {
        g0 = from.grad;
      } else {
        g0 = prov(from.q);
        ++(use_target ? target_boot : network_boot);
      }
      auto [z1, g1] =
          leapfrog_step(PhaseState(from.q, from.p), dir * cfg.dt, mass, prov, g0);
      ++(use_target ? steps_target : steps_network);
      const double h = potential(target, z1.q) + kinetic(z1.p, mass);
      if (!std::isfinite(h)) return std::nullopt;
      return std::make_pair(TreePoint{std::move(z1.q), std::move(z1.p), std::move(g1), want}, h);
    } catch (const IntegrationError&) {
      return std::nullopt;
    } catch (const NumericalDomainError&) {
      return std::nullopt;
    }
  }

  // Base case: one step in the given direction.
  //
  // Monitored mode with the flag clear takes the step with the network and
  // checks the error H(q', p') + log u against delta_hnn; exceeding it (or a
  // non-finite step) trips the flag, and the same step is then redone with
  // target gradients under the wider delta_lf stop. Once the flag is set the
  // network is not consulted at all, which both saves the wasted evaluation
  // and makes a forced-fallback run identical to a target-gradient run.
  // Traditional mode is the same code with the flag pinned clear and the
  // passed provider as the target source. H is always the true Hamiltonian.
  TreeState base_case(const TreePoint& from, double log_u, int dir, int lf_in) {
    TreeState out;
    out.log_u = log_u;
    out.lf = lf_in;

    bool use_target = !monitored || lf_in == 1;
    std::optional<std::pair<TreePoint, double>> step;
    if (!use_target) {
      step = try_step(from, dir, false);
      const double err =
          step ? step->second + log_u : std::numeric_limits<double>::infinity();
      out.err_max = err;
      if (!(err <= cfg.delta_hnn)) {  // monitor trip; also catches NaN
        out.lf = 1;
        use_target = true;
        step.reset();
      }
    }
    if (use_target) {
      step = try_step(from, dir, true);
      if (!step) {
        out.minus = out.plus = out.proposal = from;
        out.n = 0;
        out.s = 0;
        return out;
      }
      const double err = step->second + log_u;
      out.err_max = std::max(out.err_max, err);
      out.s = err <= cfg.delta_lf ? 1 : 0;
    } else {
      if (!step) {
        // Only reachable when delta_hnn is +infinity, which swallows the
        // infinite error of a failed step: end the subtree like any other
        // non-finite step instead of falling back.
        out.minus = out.plus = out.proposal = from;
        out.n = 0;
        out.s = 0;
        return out;
      }
      out.s = 1;  // the monitor did not trip, so H + log u <= delta_hnn held
    }
    out.n = log_u <= -step->second ? 1 : 0;
    out.minus = out.plus = out.proposal = step->first;
    return out;
  }

  // Doubling recursion. The second half-tree is built only while the first
  // says continue; the monitor flag is passed into and retrieved from every
  // recursive call. The within-subtree proposal swap consumes one uniform
  // only when both halves carry positive weight (probability n2/(n1+n2) is
  // then strictly between 0 and 1; the degenerate cases are decided without
  // touching the stream).
  TreeState build(const TreePoint& from, double log_u, int dir, std::uint64_t depth,
                  int lf_in) {
    if (depth == 0) return base_case(from, log_u, dir, lf_in);
    TreeState first = build(from, log_u, dir, depth - 1, lf_in);
    if (first.s != 1) return first;
    const TreePoint& edge = dir == -1 ? first.minus : first.plus;
    TreeState second = build(edge, log_u, dir, depth - 1, first.lf);

    TreeState out;
    out.log_u = log_u;
    out.lf = second.lf;
    out.err_max = std::max(first.err_max, second.err_max);
    out.proposal = first.proposal;
    if (second.n > 0) {
      if (first.n == 0) {
        out.proposal = second.proposal;
      } else if (rng.uniform01() <=
                 static_cast<double>(second.n) / static_cast<double>(first.n + second.n)) {
        out.proposal = second.proposal;
      }
    }
    out.n = first.n + second.n;
    if (dir == -1) {
      out.minus = second.minus;
      out.plus = first.plus;
    } else {
      out.minus = first.minus;
      out.plus = second.plus;
    }
    out.s = (second.s == 1 && no_uturn(out.minus, out.plus)) ? 1 : 0;
    return out;
  }
};

}  // namespace nuts_detail

// Efficient no-u-turn sampler over any gradient provider, with online error
// monitoring when the provider is a network.
//
// Per sample: draw momentum with independent N(0, m_i) components; draw the
// slice variable in the log domain, log u = -H(q, p) + log(Uniform(0, 1]),
// so log u <= -H always holds and no exp(-H) underflows; then double a
// trajectory tree in uniformly random directions until a u-turn
// ((q+ - q-) . p-/+ < 0), a stop-threshold violation, or max_tree_depth.
// Each doubling replaces the kept sample by the new subtree's proposal with
// probability min{1, n_new / n_old}.
//
// Monitored runs thread the fallback flag through every subtree call; once
// it trips, the trip sample and the following n_lf - 1 samples integrate
// with target gradients, after which the flag resets (bookkeeping at sample
// start: while the flag is set a counter increments, and reaching n_lf
// clears both). With delta_hnn = -infinity the monitor trips on every
// network attempt, and the resulting chain is sample-for-sample identical
// to the traditional sampler under the same seed.
//
// Seeded stream, consumed in this order per sample: d normals for the
// momentum (two uniforms each), one uniform for the slice variable, then per
// doubling one uniform for the direction, the inner swap uniforms of that
// subtree (depth-first), and one uniform for the outer swap only when the
// subtree is alive with weight strictly between zero and the running total.
// Nothing else draws from the stream.
inline Chain nuts(const GradientProvider& grad, const TargetDensity& target,
                  const SamplerConfig& cfg, const Vec& start) {
  cfg.validate();
  if (start.size() != target.dim || grad.dim != target.dim)
    throw DimensionError("nuts: start/provider/target dimensions disagree");
  const Eigen::Index d = target.dim;
  const MassVector mass = cfg.mass_for(d);
  const bool monitored = grad.kind == ProviderKind::network;
  const GradientProvider fallback = analytic_provider(target);
  const GradientProvider& target_prov = monitored ? fallback : grad;

  const std::uint64_t pot0 = target.potential_calls->load();
  const std::uint64_t tgrad0 = target.gradient_calls->load();
  const std::uint64_t net0 = grad.calls->load();

  RandomEngine rng(cfg.seed);
  nuts_detail::TreeContext ctx{target,      mass, target_prov, monitored ? &grad : nullptr,
                               cfg,         rng,  monitored};

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
  Vec chain_grad;
  nuts_detail::GradTag chain_tag = nuts_detail::GradTag::none;
  int lf = 0;
  std::uint64_t lf_count = 0;

  for (std::uint64_t m = 0; m < cfg.M; ++m) {
    if (monitored && lf == 1) {
      ++lf_count;
      if (lf_count == cfg.n_lf) {
        lf = 0;
        lf_count = 0;
      }
    }
    const bool lf_at_entry = lf == 1;

    Vec p0(d);
    for (Eigen::Index i = 0; i < d; ++i) p0[i] = std::sqrt(mass.m[i]) * rng.normal();
    const double h0 = potential(target, q) + kinetic(p0, mass);
    const double log_u = -h0 + std::log(rng.uniform01());

    nuts_detail::TreePoint root{q, p0, chain_grad, chain_tag};
    nuts_detail::TreePoint minus = root;
    nuts_detail::TreePoint plus = root;
    nuts_detail::TreePoint kept = root;
    bool moved = false;
    std::uint64_t n = 1;
    int s = 1;
    std::uint64_t depth = 0;
    double err_max = -std::numeric_limits<double>::infinity();

    while (s == 1 && depth < cfg.max_tree_depth) {
      const int dir = rng.direction();
      nuts_detail::TreeState t =
          ctx.build(dir == -1 ? minus : plus, log_u, dir, depth, lf);
      lf = t.lf;
      if (dir == -1) minus = t.minus; else plus = t.plus;
      err_max = std::max(err_max, t.err_max);
      if (t.s == 1 && t.n > 0) {
        const bool adopt =
            t.n >= n ||
            rng.uniform01() <= static_cast<double>(t.n) / static_cast<double>(n);
        if (adopt) {
          kept = t.proposal;
          moved = true;
        }
      }
      n += t.n;
      s = (t.s == 1 && nuts_detail::no_uturn(minus, plus)) ? 1 : 0;
      ++depth;
    }

    q = kept.q;
    chain_grad = kept.grad;
    chain_tag = kept.tag;
    chain.samples.row(static_cast<Eigen::Index>(m)) = q.transpose();
    chain.tree_depth[m] = depth;
    chain.epsilon[m] = err_max;
    const bool fell_back = monitored && (lf_at_entry || lf == 1);
    chain.fallback_flag[m] = fell_back ? 1 : 0;
    if (fell_back) ++chain.fallback_samples;
    if (moved) ++chain.accept_count;
  }

  chain.acceptance = static_cast<double>(chain.accept_count) / static_cast<double>(cfg.M);
  chain.potential_calls = target.potential_calls->load() - pot0;
  chain.grads_target_actual = target.gradient_calls->load() - tgrad0;
  chain.grads_target_reported = ctx.steps_target;
  chain.target_bootstrap_evals = ctx.target_boot;
  if (monitored) {
    chain.grads_network_actual = grad.calls->load() - net0;
    chain.grads_network_reported = ctx.steps_network;
    chain.network_bootstrap_evals = ctx.network_boot;
  }
  return chain;
}

// Single subtree construction, exposed for property tests. lf_flag plays the
// role of the monitor flag entering the subtree.
inline nuts_detail::TreeState build_tree(const PhaseState& state, double log_u, int dir,
                                         std::uint64_t depth, const SamplerConfig& cfg,
                                         const GradientProvider& grad,
                                         const TargetDensity& target, int lf_flag,
                                         RandomEngine& rng) {
  const MassVector mass = cfg.mass_for(target.dim);
  const bool monitored = grad.kind == ProviderKind::network;
  const GradientProvider fallback = analytic_provider(target);
  const GradientProvider& target_prov = monitored ? fallback : grad;
  nuts_detail::TreeContext ctx{target,      mass, target_prov, monitored ? &grad : nullptr,
                               cfg,         rng,  monitored};
  nuts_detail::TreePoint from{state.q, state.p, Vec(), nuts_detail::GradTag::none};
  return ctx.build(from, log_u, dir, depth, lf_flag);
}

}  // namespace lhnn
