#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epf/baselines/marginal.hpp"
#include "epf/rng.hpp"

namespace epf {

// Gaussian copula over D dimensions: unit-diagonal correlation matrix,
// repaired to positive definite, with its Cholesky factor.
struct CopulaModel {
  Eigen::MatrixXd correlation;
  Eigen::MatrixXd chol;  // lower triangular

  int dims() const { return static_cast<int>(correlation.rows()); }
};

// Clips eigenvalues at min_eigenvalue and rescales the diagonal back to 1,
// iterating until both hold. A matrix that already satisfies them is
// returned unchanged, which makes the repair exactly idempotent.
Eigen::MatrixXd repair_correlation(Eigen::MatrixXd a, double min_eigenvalue = 1e-8);

// Rank -> uniform (average ranks for ties, r/(N+1)) -> normal scores ->
// sample correlation, repaired. Rows of residuals are training days.
CopulaModel fit_gaussian_copula(const Eigen::MatrixXd& residuals);

// Draws S joint samples: n ~ N(0, correlation) via the Cholesky factor,
// y_d = F_d^{-1}(Phi(n_d)).
Eigen::MatrixXd copula_sample(const std::vector<MarginalForecast>& marginals,
                              const CopulaModel& copula, int num_samples, Rng& rng);

}  // namespace epf
