#pragma once

#include <Eigen/Dense>

#include "epf/rng.hpp"

namespace epf {

// Multivariate Gaussian error model: scenarios are xbar + eps with
// eps ~ N(0, Sigma), Sigma estimated from ensemble-mean residuals.
struct MgeModel {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd chol;  // lower triangular factor of covariance + jitter

  int dims() const { return static_cast<int>(covariance.rows()); }
};

// Rows of residuals are training days (y - xbar). Eigenvalues are clipped at
// 1e-8 and the diagonal jittered before the Cholesky, so rank-deficient
// estimates still factor.
MgeModel fit_mge(const Eigen::MatrixXd& residuals);

Eigen::MatrixXd sample_mge(const MgeModel& model, const Eigen::VectorXd& xbar, int num_samples,
                           Rng& rng);

}  // namespace epf
