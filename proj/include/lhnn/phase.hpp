#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lhnn/errors.hpp"

namespace lhnn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// Position/momentum pair z = (q, p); the unit of integration and sampling.
// Invariants: q and p share length d >= 1 and every entry is finite.
struct PhaseState {
  Vec q;
  Vec p;

  PhaseState(Vec q_in, Vec p_in) : q(std::move(q_in)), p(std::move(p_in)) {
    if (q.size() < 1 || q.size() != p.size())
      throw DimensionError("PhaseState: q and p must share length d >= 1 (got " +
                           std::to_string(q.size()) + " and " + std::to_string(p.size()) + ")");
    if (!all_finite(q) || !all_finite(p))
      throw NumericalDomainError("PhaseState: non-finite entry in q or p");
  }

  Eigen::Index dim() const { return q.size(); }
};

// Diagonal mass metric; kinetic energy is sum_i p_i^2 / (2 m_i).
// Invariant: every entry strictly positive. Default: all ones.
struct MassVector {
  Vec m;

  explicit MassVector(Vec m_in) : m(std::move(m_in)) {
    if (m.size() < 1) throw DimensionError("MassVector: length must be >= 1");
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (!(m[i] > 0.0) || !std::isfinite(m[i]))
        throw NumericalDomainError("MassVector: entry " + std::to_string(i) +
                                   " must be strictly positive and finite");
  }

  static MassVector ones(Eigen::Index d) { return MassVector(Vec::Ones(d)); }

  Eigen::Index dim() const { return m.size(); }
};

}  // namespace lhnn
