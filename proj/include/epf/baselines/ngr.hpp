#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epf/baselines/marginal.hpp"

namespace epf {

enum class NgrEstimation { ml, crps };

// Per-hour Gaussian regression: mu = b0 + b1 * xbar, sigma = c0 + c1 * s
// (s = ensemble member standard deviation), sigma clipped from below.
struct NgrHourParams {
  double b0 = 0.0, b1 = 1.0, c0 = 1.0, c1 = 0.0;
};

struct NgrModel {
  std::vector<NgrHourParams> hours;
  NgrEstimation method = NgrEstimation::ml;
  double sigma_min = 1e-3;  // standardized units

  double predict_mu(int hour, double xbar) const;
  double predict_sigma(int hour, double spread) const;
  MarginalForecast predict_marginal(int hour, double xbar, double spread) const;
};

struct NgrHourData {
  Eigen::VectorXd xbar;    // ensemble mean per training day
  Eigen::VectorXd spread;  // member standard deviation per training day
  Eigen::VectorXd y;       // realized value per training day
};

// Minimizes the mean Gaussian negative log-likelihood (ml) or the mean
// closed-form Gaussian CRPS (crps) per hour, from a least-squares start.
NgrModel fit_ngr(const std::vector<NgrHourData>& data, NgrEstimation method,
                 double sigma_min = 1e-3);

// Objective helpers, exposed for the multi-start oracle in the tests.
double ngr_objective(const NgrHourData& data, const NgrHourParams& p, NgrEstimation method,
                     double sigma_min);
NgrHourParams fit_ngr_hour(const NgrHourData& data, NgrEstimation method, double sigma_min);

}  // namespace epf
