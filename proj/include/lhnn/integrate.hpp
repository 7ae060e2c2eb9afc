#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lhnn/io.hpp"
#include "lhnn/phase.hpp"
#include "lhnn/provider.hpp"

namespace lhnn {

// One synchronized-leapfrog trajectory. states[0] is the supplied initial
// condition and the spacing is uniform dt > 0. grads[i] caches the provider
// gradient at states[i]; new_gradient_calls is exactly N + 1 when the initial
// gradient was not supplied by the caller.
struct Trajectory {
  std::vector<PhaseState> states;
  std::vector<Vec> grads;
  double dt = 0.0;
  std::uint64_t new_gradient_calls = 0;
};

// One synchronized leapfrog step:
//   q' = q + dt p ./ m - (dt^2 / 2) g(q) ./ m
//   p' = p - (dt / 2) (g(q) + g(q'))
// cached_grad, when present, must equal g(q) from the previous step; the step
// then costs exactly one new provider call (two otherwise). The returned
// gradient is g(q') for reuse by the next step. dt's sign selects the
// direction of time; tree-based samplers integrate backward with dt < 0.
inline std::pair<PhaseState, Vec> leapfrog_step(const PhaseState& state, double dt,
                                                const MassVector& m,
                                                const GradientProvider& grad,
                                                const std::optional<Vec>& cached_grad = {}) {
  if (dt == 0.0) throw ConfigError("leapfrog_step: dt must be nonzero");
  if (state.dim() != m.dim() || state.dim() != grad.dim)
    throw DimensionError("leapfrog_step: inconsistent dimensions");
  Vec g0 = cached_grad ? *cached_grad : grad(state.q);
  if (!all_finite(g0))
    throw IntegrationError("leapfrog_step: non-finite gradient at the step start");
  Vec q1 = state.q + dt * (state.p.array() / m.m.array()).matrix() -
           (0.5 * dt * dt) * (g0.array() / m.m.array()).matrix();
  if (!all_finite(q1)) throw IntegrationError("leapfrog_step: non-finite position");
  Vec g1 = grad(q1);
  if (!all_finite(g1)) throw IntegrationError("leapfrog_step: non-finite gradient at the new position");
  Vec p1 = state.p - (0.5 * dt) * (g0 + g1);
  if (!all_finite(p1)) throw IntegrationError("leapfrog_step: non-finite momentum");
  return {PhaseState(std::move(q1), std::move(p1)), std::move(g1)};
}

// N leapfrog steps with gradient caching at step boundaries, so the whole
// trajectory consumes exactly N + 1 provider calls (the initial gradient plus
// one per step); supplying initial_grad (must equal g(start.q)) drops the
// count to N. Failures carry the 1-based index of the offending step.
inline Trajectory integrate(const PhaseState& start, std::uint64_t steps, double dt,
                            const MassVector& m, const GradientProvider& grad,
                            const std::optional<Vec>& initial_grad = {}) {
  if (steps < 1) throw ConfigError("integrate: need at least one step");
  if (!(dt > 0.0)) throw ConfigError("integrate: dt must be positive");
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(steps + 1);
  traj.grads.reserve(steps + 1);
  traj.states.push_back(start);
  if (initial_grad) {
    traj.grads.push_back(*initial_grad);
  } else {
    traj.grads.push_back(grad(start.q));
    ++traj.new_gradient_calls;
  }
  for (std::uint64_t i = 1; i <= steps; ++i) {
    try {
      auto [next, g] = leapfrog_step(traj.states.back(), dt, m, grad, traj.grads.back());
      traj.states.push_back(std::move(next));
      traj.grads.push_back(std::move(g));
      ++traj.new_gradient_calls;
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string(e.what()) + " (step " + std::to_string(i) + ")", i);
    }
  }
  return traj;
}

// CSV export (t, q_1..q_d, p_1..p_d) for phase-space plotting.
inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  const Eigen::Index d = traj.states.front().dim();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= d; ++i) header.push_back("q_" + std::to_string(i));
  for (Eigen::Index i = 1; i <= d; ++i) header.push_back("p_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(2 * d) + 1);
    row.push_back(static_cast<double>(k) * traj.dt);
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(traj.states[k].q[i]);
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(traj.states[k].p[i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

}  // namespace lhnn
