#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epf/baselines/marginal.hpp"

namespace epf {

// Linear quantile regression by iteratively reweighted least squares with a
// smoothing floor decreasing to 1e-6. X carries the intercept column if one
// is wanted. used_ridge, when given, reports whether a degenerate design
// forced the ridge-jitter fallback.
Eigen::VectorXd fit_quantile_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        double tau, bool* used_ridge = nullptr);

// Quantile regression averaging: one regression per (hour, tau) of the
// realized price on [1, x^1, ..., x^M].
struct QraModel {
  std::vector<double> taus;
  // coeffs[hour] is T x (M+1), row per tau, intercept first.
  std::vector<Eigen::MatrixXd> coeffs;
  int fit_warnings = 0;  // regressions that needed the ridge-jitter fallback

  int hours() const { return static_cast<int>(coeffs.size()); }
  int members() const { return static_cast<int>(coeffs.front().cols()) - 1; }

  // Predicted quantile grid for one hour given that day's member forecasts,
  // rearranged into a marginal.
  MarginalForecast predict_marginal(int hour, const Eigen::VectorXd& members) const;
};

// x_by_day: one D x M matrix per training day; y_by_day: realized D-vectors.
QraModel fit_qra(const std::vector<Eigen::MatrixXd>& x_by_day,
                 const std::vector<Eigen::VectorXd>& y_by_day, std::vector<double> taus);

}  // namespace epf
