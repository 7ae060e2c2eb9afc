#pragma once

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

#include "lhnn/phase.hpp"

namespace lhnn_test {

// Central finite-difference gradient used as the independent oracle for every
// analytic gradient in the suite.
inline lhnn::Vec fd_gradient(const std::function<double(const lhnn::Vec&)>& f,
                             const lhnn::Vec& q, double h = 1e-6) {
  lhnn::Vec g(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    lhnn::Vec lo = q, hi = q;
    lo[i] -= h;
    hi[i] += h;
    g[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// Relative error with an absolute floor so near-zero components do not blow
// the ratio up.
inline double rel_err(double got, double want, double floor = 1e-8) {
  const double scale = std::max(std::abs(want), floor);
  return std::abs(got - want) / scale;
}

inline double max_rel_err(const lhnn::Vec& got, const lhnn::Vec& want, double floor = 1e-8) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.size(); ++i)
    worst = std::max(worst, rel_err(got[i], want[i], floor));
  return worst;
}

// Fresh scratch directory per test run, rooted in the system temp dir.
inline std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path() /
                    ("lhnn_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++));
  std::filesystem::create_directories(base);
  return base.string();
}

}  // namespace lhnn_test
