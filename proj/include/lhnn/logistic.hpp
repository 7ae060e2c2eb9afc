#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>

#include "lhnn/io.hpp"
#include "lhnn/rng.hpp"
#include "lhnn/target.hpp"

namespace lhnn {

// Binary-classification dataset for Bayesian logistic regression.
// Invariants: every non-intercept predictor column has sample mean within
// 1e-9 of 0 and sample standard deviation within 1e-9 of 1; every label is
// exactly -1 or +1. When an intercept is requested it is appended as an
// unnormalized all-ones column and counts toward d.
struct LogisticDataset {
  Mat predictors;  // K x d
  Vec labels;      // K entries in {-1, +1}
  Eigen::Index K = 0;
  Eigen::Index d = 0;
  bool has_intercept = false;
};

inline void validate_logistic_dataset(const LogisticDataset& ds) {
  if (ds.predictors.rows() != ds.K || ds.predictors.cols() != ds.d || ds.labels.size() != ds.K)
    throw DimensionError("LogisticDataset: inconsistent shapes");
  const Eigen::Index normalized_cols = ds.d - (ds.has_intercept ? 1 : 0);
  for (Eigen::Index j = 0; j < normalized_cols; ++j) {
    const double mean = ds.predictors.col(j).mean();
    const double var =
        (ds.predictors.col(j).array() - mean).square().sum() / static_cast<double>(ds.K);
    if (std::abs(mean) > 1e-9 || std::abs(std::sqrt(var) - 1.0) > 1e-9)
      throw NumericalDomainError("LogisticDataset: column " + std::to_string(j) +
                                 " is not normalized");
  }
  for (Eigen::Index i = 0; i < ds.K; ++i)
    if (ds.labels[i] != -1.0 && ds.labels[i] != 1.0)
      throw NumericalDomainError("LogisticDataset: label at row " + std::to_string(i) +
                                 " is not in {-1, +1}");
}

namespace detail {

// Population standard deviation (divide by K), the convention checked by the
// dataset invariant.
inline void normalize_column(Mat& m, Eigen::Index j) {
  const double mean = m.col(j).mean();
  const double var = (m.col(j).array() - mean).square().sum() / static_cast<double>(m.rows());
  const double sd = std::sqrt(var);
  if (sd < 1e-12)
    throw ParseError("zero variance column " + std::to_string(j) + ": cannot normalize");
  m.col(j) = (m.col(j).array() - mean) / sd;
}

}  // namespace detail

// Reads a CSV whose final column is the label and whose remaining columns are
// numeric predictors; normalizes each predictor column to mean 0, sd 1. The
// two distinct raw label values are mapped smaller -> +1, larger -> -1
// (a file with labels {1, 2} yields +1 for 1 and -1 for 2).
inline LogisticDataset load_logistic_dataset(const std::string& path, bool intercept = false) {
  CsvTable table = read_csv(path);
  if (table.rows.empty()) throw ParseError("logistic dataset is empty: " + path);
  const Eigen::Index cols = static_cast<Eigen::Index>(table.rows.front().size());
  if (cols < 2)
    throw ParseError("logistic dataset needs at least one predictor column and a label column");
  const Eigen::Index K = static_cast<Eigen::Index>(table.rows.size());
  const Eigen::Index d_pred = cols - 1;

  std::set<double> distinct;
  for (const auto& row : table.rows) distinct.insert(row.back());
  if (distinct.size() != 2) {
    // Report the first offending row for the three-or-more case.
    if (distinct.size() > 2) {
      std::set<double> seen;
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        seen.insert(table.rows[i].back());
        if (seen.size() > 2)
          throw ParseError("labels take more than two distinct values; third value first seen at data row " +
                           std::to_string(i + 1));
      }
    }
    throw ParseError("labels must take exactly two distinct values, found " +
                     std::to_string(distinct.size()));
  }
  const double lo = *distinct.begin();

  LogisticDataset ds;
  ds.K = K;
  ds.d = d_pred + (intercept ? 1 : 0);
  ds.has_intercept = intercept;
  ds.predictors.resize(K, ds.d);
  ds.labels.resize(K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < d_pred; ++j)
      ds.predictors(i, j) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    ds.labels[i] = table.rows[static_cast<std::size_t>(i)].back() == lo ? 1.0 : -1.0;
  }
  for (Eigen::Index j = 0; j < d_pred; ++j) detail::normalize_column(ds.predictors, j);
  if (intercept) ds.predictors.col(ds.d - 1).setOnes();
  validate_logistic_dataset(ds);
  return ds;
}

// Seeded separable-with-noise generator for hermetic tests: predictors are
// standard normal, labels follow a logistic model around a fixed random
// hyperplane, and columns are normalized afterwards.
inline LogisticDataset synthetic_logistic_dataset(Eigen::Index K, Eigen::Index d,
                                                  std::uint64_t seed) {
  if (K < 2 || d < 1) throw ConfigError("synthetic_logistic_dataset: need K >= 2 and d >= 1");
  RandomEngine rng(seed);
  LogisticDataset ds;
  ds.K = K;
  ds.d = d;
  ds.has_intercept = false;
  ds.predictors.resize(K, d);
  ds.labels.resize(K);
  Vec w(d);
  for (Eigen::Index j = 0; j < d; ++j) w[j] = rng.normal();
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < d; ++j) ds.predictors(i, j) = rng.normal();
  for (Eigen::Index i = 0; i < K; ++i) {
    const double margin = 2.0 * ds.predictors.row(i).dot(w);
    const double p_plus = 1.0 / (1.0 + std::exp(-margin));
    ds.labels[i] = rng.uniform01() <= p_plus ? 1.0 : -1.0;
  }
  for (Eigen::Index j = 0; j < d; ++j) detail::normalize_column(ds.predictors, j);
  validate_logistic_dataset(ds);
  return ds;
}

// U(q) = sum_i log(1 + exp(-y_i q' z_i)) + ||q||^2 / 2, the negative
// log-posterior of logistic regression under a standard normal prior, with
// constants dropped. The softplus is evaluated in its overflow-safe form.
inline TargetDensity make_logistic_target(std::shared_ptr<const LogisticDataset> data) {
  validate_logistic_dataset(*data);
  TargetDensity t;
  t.dim = data->d;
  t.name = "logistic";
  t.potential_fn = [data](const Vec& q) {
    Vec margins = data->predictors * q;  // K entries of q' z_i
    double u = 0.5 * q.squaredNorm();
    for (Eigen::Index i = 0; i < data->K; ++i) {
      const double x = -data->labels[i] * margins[i];
      u += x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    }
    return u;
  };
  t.gradient_fn = [data](const Vec& q) {
    Vec margins = data->predictors * q;
    Vec coeff(data->K);
    for (Eigen::Index i = 0; i < data->K; ++i) {
      const double x = -data->labels[i] * margins[i];
      const double sigma = x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      coeff[i] = -data->labels[i] * sigma;
    }
    return Vec(data->predictors.transpose() * coeff + q);
  };
  return t;
}

}  // namespace lhnn
