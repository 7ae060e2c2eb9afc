#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

#include "lhnn/network.hpp"
#include "lhnn/target.hpp"

namespace lhnn {

enum class ProviderKind { analytic, network };

// The abstraction both samplers integrate against: a position-gradient field
// g(q) approximating dH/dq. The call counter increments exactly once per
// evaluation and is atomic so a provider may be shared across chains.
struct GradientProvider {
  Eigen::Index dim = 0;
  ProviderKind kind = ProviderKind::analytic;
  std::function<Vec(const Vec&)> g;
  std::shared_ptr<std::atomic<std::uint64_t>> calls =
      std::make_shared<std::atomic<std::uint64_t>>(0);

  Vec operator()(const Vec& q) const {
    if (q.size() != dim)
      throw DimensionError("GradientProvider: position length " + std::to_string(q.size()) +
                           " does not match dimension " + std::to_string(dim));
    calls->fetch_add(1, std::memory_order_relaxed);
    return g(q);
  }
};

// Analytic provider: g(q) = grad U(q). Each call also advances the target's
// own gradient counter, which is what run accounting reconciles against.
inline GradientProvider analytic_provider(const TargetDensity& target) {
  GradientProvider p;
  p.dim = target.dim;
  p.kind = ProviderKind::analytic;
  p.g = [target](const Vec& q) { return grad_potential(target, q); };
  return p;
}

// Network provider: g(q) is the position block of the surrogate input
// gradient evaluated at (q, p = 0). Evaluating at zero momentum makes the
// field a function of position alone, so the induced leapfrog dynamics is
// exactly Hamiltonian with effective potential H_net(q, 0); gradient caching
// across steps and exact time reversibility then hold just as in the
// analytic case. Never touches the target's counters.
inline GradientProvider network_provider(std::shared_ptr<const NetworkParams> net) {
  validate_params(*net);
  if (net->arch.input_dim % 2 != 0)
    throw ConfigError("network_provider: network input length must be 2d");
  GradientProvider p;
  p.dim = net->arch.input_dim / 2;
  p.kind = ProviderKind::network;
  const Eigen::Index d = p.dim;
  p.g = [net, d](const Vec& q) {
    Vec z = Vec::Zero(2 * d);
    z.head(d) = q;
    return Vec(input_gradient(*net, z).head(d));
  };
  return p;
}

}  // namespace lhnn
