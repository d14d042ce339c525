#include "epf/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "epf/math.hpp"

namespace epf {

void ScoringConfig::validate() const {
  if (!(es_beta > 0.0 && es_beta < 2.0)) {
    throw std::invalid_argument("ScoringConfig: es_beta must lie in (0,2)");
  }
}

namespace {

inline double pow_beta(double norm, double beta) {
  return beta == 1.0 ? norm : std::pow(norm, beta);
}

void check_pair_count(Eigen::Index s, const ScoringConfig& cfg) {
  cfg.validate();
  if (s < 1) throw std::invalid_argument("energy_score: need at least one scenario");
  if (s < 2 && cfg.pair_estimator == PairEstimator::unbiased) {
    throw std::invalid_argument("energy_score: unbiased estimator needs S >= 2");
  }
}

double pair_denominator(Eigen::Index s, const ScoringConfig& cfg) {
  const double sd = static_cast<double>(s);
  return cfg.pair_estimator == PairEstimator::unbiased ? 2.0 * sd * (sd - 1.0) : 2.0 * sd * sd;
}

}  // namespace

double energy_score(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& y,
                    const ScoringConfig& cfg) {
  const Eigen::Index s = scenarios.rows();
  check_pair_count(s, cfg);
  if (scenarios.cols() != y.size()) {
    throw std::invalid_argument("energy_score: dimension mismatch");
  }

  // Column-major copy so each scenario is contiguous in the pair loop.
  const Eigen::MatrixXd cols = scenarios.transpose();

  // Each row writes into its own slot; the final sums run serially in index
  // order, so results do not depend on scheduling or thread count.
  std::vector<double> to_y(static_cast<std::size_t>(s));
  std::vector<double> row_pair(static_cast<std::size_t>(s), 0.0);
  const double beta = cfg.es_beta;

#pragma omp parallel for schedule(static, 1)
  for (Eigen::Index i = 0; i < s; ++i) {
    to_y[i] = pow_beta((cols.col(i) - y).norm(), beta);
    double acc = 0.0;
    for (Eigen::Index j = i + 1; j < s; ++j) {
      acc += pow_beta((cols.col(i) - cols.col(j)).norm(), beta);
    }
    row_pair[i] = acc;
  }

  double data_term = 0.0, pair_sum = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    data_term += to_y[i];
    pair_sum += row_pair[i];
  }
  // row_pair holds unordered pairs; the estimator sums ordered pairs.
  return data_term / static_cast<double>(s) - 2.0 * pair_sum / pair_denominator(s, cfg);
}

double crps_sample(std::span<const double> samples, double y, const ScoringConfig& cfg) {
  const Eigen::Index s = static_cast<Eigen::Index>(samples.size());
  check_pair_count(s, cfg);

  double data_term = 0.0;
  for (double x : samples) data_term += pow_beta(std::abs(x - y), cfg.es_beta);
  data_term /= static_cast<double>(s);

  double pair_ordered;
  if (cfg.es_beta == 1.0) {
    // sum_{i<j} (x_(j) - x_(i)) = sum_k (2k - S + 1) x_(k) over sorted samples.
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < s; ++k) {
      acc += static_cast<double>(2 * k - s + 1) * sorted[static_cast<std::size_t>(k)];
    }
    pair_ordered = 2.0 * acc;
  } else {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = i + 1; j < s; ++j) {
        acc += pow_beta(std::abs(samples[i] - samples[j]), cfg.es_beta);
      }
    }
    pair_ordered = 2.0 * acc;
  }
  return data_term - pair_ordered / pair_denominator(s, cfg);
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("crps_gaussian: sigma must be positive");
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * norm_cdf(z) - 1.0) + 2.0 * norm_pdf(z) -
                  1.0 / std::sqrt(std::numbers::pi));
}

double pinball_loss(double q_pred, double y, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("pinball_loss: tau must lie in (0,1)");
  }
  return y >= q_pred ? tau * (y - q_pred) : (1.0 - tau) * (q_pred - y);
}

double mae(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size() || pred.empty()) {
    throw std::invalid_argument("mae: inputs must have equal nonzero length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
  return s / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size() || pred.empty()) {
    throw std::invalid_argument("rmse: inputs must have equal nonzero length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

namespace reference {

double energy_score(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& y,
                    const ScoringConfig& cfg) {
  const Eigen::Index s = scenarios.rows();
  check_pair_count(s, cfg);
  double data_term = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    data_term += pow_beta((scenarios.row(i).transpose() - y).norm(), cfg.es_beta);
  }
  double pair_ordered = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      if (j == i) continue;
      pair_ordered += pow_beta((scenarios.row(i) - scenarios.row(j)).norm(), cfg.es_beta);
    }
  }
  return data_term / static_cast<double>(s) - pair_ordered / pair_denominator(s, cfg);
}

double crps_sample(std::span<const double> samples, double y, const ScoringConfig& cfg) {
  const Eigen::Index s = static_cast<Eigen::Index>(samples.size());
  check_pair_count(s, cfg);
  double data_term = 0.0;
  for (double x : samples) data_term += pow_beta(std::abs(x - y), cfg.es_beta);
  double pair_ordered = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      if (j == i) continue;
      pair_ordered += pow_beta(std::abs(samples[i] - samples[j]), cfg.es_beta);
    }
  }
  return data_term / static_cast<double>(s) - pair_ordered / pair_denominator(s, cfg);
}

}  // namespace reference
}  // namespace epf
