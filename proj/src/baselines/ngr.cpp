#include "epf/baselines/ngr.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "epf/optim.hpp"
#include "epf/scoring.hpp"

namespace epf {

double NgrModel::predict_mu(int hour, double xbar) const {
  const auto& p = hours.at(static_cast<std::size_t>(hour));
  return p.b0 + p.b1 * xbar;
}

double NgrModel::predict_sigma(int hour, double spread) const {
  const auto& p = hours.at(static_cast<std::size_t>(hour));
  return std::max(p.c0 + p.c1 * spread, sigma_min);
}

MarginalForecast NgrModel::predict_marginal(int hour, double xbar, double spread) const {
  return MarginalForecast::gaussian(predict_mu(hour, xbar), predict_sigma(hour, spread));
}

double ngr_objective(const NgrHourData& data, const NgrHourParams& p, NgrEstimation method,
                     double sigma_min) {
  const Eigen::Index n = data.y.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = p.b0 + p.b1 * data.xbar[i];
    const double sigma = std::max(p.c0 + p.c1 * data.spread[i], sigma_min);
    if (method == NgrEstimation::ml) {
      const double z = (data.y[i] - mu) / sigma;
      total += 0.5 * z * z + std::log(sigma) + 0.5 * std::log(2.0 * std::numbers::pi);
    } else {
      total += crps_gaussian(mu, sigma, data.y[i]);
    }
  }
  return total / static_cast<double>(n);
}

namespace {

NgrHourParams least_squares_start(const NgrHourData& data) {
  const Eigen::Index n = data.y.size();
  Eigen::MatrixXd X(n, 2);
  X.col(0).setOnes();
  X.col(1) = data.xbar;
  Eigen::MatrixXd lhs = X.transpose() * X;
  lhs.diagonal().array() += 1e-10;
  const Eigen::Vector2d b = lhs.ldlt().solve(X.transpose() * data.y);
  const Eigen::VectorXd resid = data.y - X * b;
  NgrHourParams p;
  p.b0 = b[0];
  p.b1 = b[1];
  p.c0 = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  if (!(p.c0 > 0.0)) p.c0 = 1e-2;
  p.c1 = 0.0;
  return p;
}

}  // namespace

NgrHourParams fit_ngr_hour(const NgrHourData& data, NgrEstimation method, double sigma_min) {
  if (data.y.size() < 10) throw std::invalid_argument("fit_ngr: need >= 10 examples per hour");
  if (data.xbar.size() != data.y.size() || data.spread.size() != data.y.size()) {
    throw std::invalid_argument("fit_ngr: misaligned per-hour arrays");
  }

  const auto pack = [](const NgrHourParams& p) {
    return Eigen::Vector4d(p.b0, p.b1, p.c0, p.c1);
  };
  const auto unpack = [](const Eigen::VectorXd& v) {
    return NgrHourParams{v[0], v[1], v[2], v[3]};
  };
  const auto objective = [&](const Eigen::VectorXd& v) {
    return ngr_objective(data, unpack(v), method, sigma_min);
  };

  NelderMeadOptions opt;
  opt.max_evals = 6000;
  opt.f_tol = 1e-13;

  Eigen::VectorXd best = nelder_mead(objective, pack(least_squares_start(data)), opt);
  double best_f = objective(best);
  // A restart from the first solution escapes premature simplex collapse.
  for (int r = 0; r < 2; ++r) {
    const Eigen::VectorXd refined = nelder_mead(objective, best, opt);
    const double f = objective(refined);
    if (f < best_f) {
      best_f = f;
      best = refined;
    }
  }
  return unpack(best);
}

NgrModel fit_ngr(const std::vector<NgrHourData>& data, NgrEstimation method, double sigma_min) {
  if (data.empty()) throw std::invalid_argument("fit_ngr: no hours");
  NgrModel model;
  model.method = method;
  model.sigma_min = sigma_min;
  model.hours.resize(data.size());
#pragma omp parallel for schedule(dynamic)
  for (int h = 0; h < static_cast<int>(data.size()); ++h) {
    model.hours[static_cast<std::size_t>(h)] =
        fit_ngr_hour(data[static_cast<std::size_t>(h)], method, sigma_min);
  }
  return model;
}

}  // namespace epf
