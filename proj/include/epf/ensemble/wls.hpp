#pragma once

#include <Eigen/Dense>

namespace epf {

// Weighted least squares: minimizes sum_i k_i (y_i - x_i' w)^2. Solved by
// QR on the sqrt-weighted system; rank deficiency falls back to normal
// equations with a 1e-8 scaled diagonal jitter. weights == ones is plain OLS.
Eigen::VectorXd fit_wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& weights);

Eigen::VectorXd fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace epf
