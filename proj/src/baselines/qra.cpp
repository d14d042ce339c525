#include "epf/baselines/qra.hpp"

#include <atomic>
#include <numeric>
#include <cmath>
#include <stdexcept>

#include "epf/scoring.hpp"

namespace epf {

namespace {

double mean_pinball(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta, double tau) {
  const Eigen::VectorXd r = y - X * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    s += r[i] >= 0.0 ? tau * r[i] : (tau - 1.0) * r[i];
  }
  return s / static_cast<double>(r.size());
}

// Weighted normal equations with an optional ridge. Returns false when the
// solve produced non-finite coefficients.
bool solve_weighted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double ridge, Eigen::VectorXd& beta) {
  const Eigen::MatrixXd Xw = w.asDiagonal() * X;
  Eigen::MatrixXd lhs = X.transpose() * Xw;
  if (ridge > 0.0) lhs.diagonal().array() += ridge * (1.0 + lhs.diagonal().mean());
  const Eigen::VectorXd rhs = Xw.transpose() * y;
  beta = lhs.ldlt().solve(rhs);
  return beta.allFinite();
}

}  // namespace

Eigen::VectorXd fit_quantile_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        double tau, bool* used_ridge) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("fit_quantile_regression: tau must lie in (0,1)");
  }
  if (X.rows() != y.size() || X.rows() < X.cols() + 2) {
    throw std::invalid_argument("fit_quantile_regression: need at least cols+2 rows");
  }

  if (used_ridge) *used_ridge = false;
  const Eigen::Index n = X.rows();
  Eigen::VectorXd beta;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (!solve_weighted(X, y, w, 0.0, beta)) {
    solve_weighted(X, y, w, 1e-8, beta);
    if (used_ridge) *used_ridge = true;
  }

  // ||r|| floor shrinks each sweep; the reweighted L2 problem then
  // approaches the check-loss minimizer. Weights are normalized by their
  // largest value to keep the normal equations conditioned.
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  double floor = scale;
  double best_loss = mean_pinball(X, y, beta, tau);
  Eigen::VectorXd best = beta;
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd r = y - X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = r[i] >= 0.0 ? tau : 1.0 - tau;
      w[i] = q / std::max(std::abs(r[i]), floor);
    }
    w /= w.maxCoeff();
    Eigen::VectorXd next;
    if (!solve_weighted(X, y, w, 0.0, next)) {
      if (used_ridge) *used_ridge = true;
      if (!solve_weighted(X, y, w, 1e-8, next)) break;
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    const double loss = mean_pinball(X, y, beta, tau);
    if (loss < best_loss) {
      best_loss = loss;
      best = beta;
    }
    if (floor <= 1e-9 * scale && change < 1e-13 * scale) break;
    floor = std::max(floor * 0.3, 1e-9 * scale);
  }

  // Vertex polish: the optimum interpolates cols(X) observations, so snap to
  // the basis suggested by the smallest residuals whenever that improves the
  // exact check loss.
  const Eigen::Index p = X.cols();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (int polish = 0; polish < 50; ++polish) {
    const Eigen::VectorXd r = (y - X * best).cwiseAbs();
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::partial_sort(idx.begin(), idx.begin() + p, idx.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return r[a] < r[b]; });
    Eigen::MatrixXd sub(p, p);
    Eigen::VectorXd rhs(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      sub.row(k) = X.row(idx[static_cast<std::size_t>(k)]);
      rhs[k] = y[idx[static_cast<std::size_t>(k)]];
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible()) break;
    const Eigen::VectorXd candidate = lu.solve(rhs);
    const double loss = mean_pinball(X, y, candidate, tau);
    if (candidate.allFinite() && loss < best_loss * (1.0 - 1e-14)) {
      best_loss = loss;
      best = candidate;
    } else {
      break;
    }
  }
  return best;
}

QraModel fit_qra(const std::vector<Eigen::MatrixXd>& x_by_day,
                 const std::vector<Eigen::VectorXd>& y_by_day, std::vector<double> taus) {
  if (x_by_day.empty() || x_by_day.size() != y_by_day.size()) {
    throw std::invalid_argument("fit_qra: day lists must be non-empty and aligned");
  }
  const int days = static_cast<int>(x_by_day.size());
  const int hours = static_cast<int>(x_by_day.front().rows());
  const int members = static_cast<int>(x_by_day.front().cols());
  if (days < members + 2) throw std::invalid_argument("fit_qra: need at least M+2 training days");

  QraModel model;
  model.taus = std::move(taus);
  model.coeffs.assign(hours, Eigen::MatrixXd::Zero(static_cast<int>(model.taus.size()), members + 1));

  std::atomic<int> warnings{0};
  const int total = hours * static_cast<int>(model.taus.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < total; ++k) {
    const int h = k / static_cast<int>(model.taus.size());
    const int t = k % static_cast<int>(model.taus.size());
    Eigen::MatrixXd X(days, members + 1);
    Eigen::VectorXd y(days);
    for (int d = 0; d < days; ++d) {
      X(d, 0) = 1.0;
      X.row(d).tail(members) = x_by_day[d].row(h);
      y[d] = y_by_day[d][h];
    }
    bool used_ridge = false;
    model.coeffs[h].row(t) = fit_quantile_regression(X, y, model.taus[t], &used_ridge).transpose();
    if (used_ridge) ++warnings;
  }
  model.fit_warnings = warnings.load();
  return model;
}

MarginalForecast QraModel::predict_marginal(int hour, const Eigen::VectorXd& members_x) const {
  const Eigen::MatrixXd& c = coeffs.at(static_cast<std::size_t>(hour));
  Eigen::VectorXd features(members_x.size() + 1);
  features[0] = 1.0;
  features.tail(members_x.size()) = members_x;
  Eigen::VectorXd values = c * features;
  return MarginalForecast::from_quantiles(taus, {values.data(), static_cast<std::size_t>(values.size())});
}

}  // namespace epf
