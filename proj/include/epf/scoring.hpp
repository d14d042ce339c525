#pragma once

#include <Eigen/Dense>
#include <span>

namespace epf {

enum class PairEstimator { unbiased, biased };

struct ScoringConfig {
  // Exponent of the norm; the score is strictly proper for values in (0, 2).
  double es_beta = 1.0;
  PairEstimator pair_estimator = PairEstimator::unbiased;
  void validate() const;
};

// Sample energy score of an S x D scenario set against the realization y.
// Unbiased form: (1/S) sum_s ||yhat_s - y||^b
//              - (1/(2 S (S-1))) sum_{s != s'} ||yhat_s - yhat_s'||^b.
// The biased variant divides the pair sum by 2 S^2 instead and admits S = 1.
// The pair term is OpenMP-parallel; see reference::energy_score for the
// serial double loop used as a test oracle.
double energy_score(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& y,
                    const ScoringConfig& cfg = {});

// CRPS sample estimator; identical to energy_score at D = 1, beta = 1, but
// computed in O(S log S) via sorting when beta == 1.
double crps_sample(std::span<const double> samples, double y, const ScoringConfig& cfg = {});

// Closed form CRPS of a N(mu, sigma^2) forecast.
double crps_gaussian(double mu, double sigma, double y);

double pinball_loss(double q_pred, double y, double tau);

double mae(std::span<const double> pred, std::span<const double> actual);
double rmse(std::span<const double> pred, std::span<const double> actual);

// Serial O(S^2 D) estimators, kept as independent references for tests and
// the kernel benchmark.
namespace reference {
double energy_score(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& y,
                    const ScoringConfig& cfg = {});
double crps_sample(std::span<const double> samples, double y, const ScoringConfig& cfg = {});
}  // namespace reference

}  // namespace epf
