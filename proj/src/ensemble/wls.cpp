#include "epf/ensemble/wls.hpp"

#include <stdexcept>

namespace epf {

Eigen::VectorXd fit_wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& weights) {
  if (X.rows() != y.size() || X.rows() != weights.size()) {
    throw std::invalid_argument("fit_wls: row count mismatch");
  }
  if (X.rows() < X.cols()) throw std::invalid_argument("fit_wls: need rows >= cols");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("fit_wls: negative weight");

  const Eigen::VectorXd sw = weights.cwiseSqrt();
  const Eigen::MatrixXd Xw = sw.asDiagonal() * X;
  const Eigen::VectorXd yw = sw.cwiseProduct(y);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
  if (qr.rank() == X.cols()) {
    Eigen::VectorXd w = qr.solve(yw);
    if (w.allFinite()) return w;
  }

  // Rank-deficient design: jittered normal equations.
  Eigen::MatrixXd lhs = Xw.transpose() * Xw;
  const double scale = lhs.diagonal().mean();
  lhs.diagonal().array() += 1e-8 * (scale > 0.0 ? scale : 1.0);
  Eigen::VectorXd w = lhs.ldlt().solve(Xw.transpose() * yw);
  if (!w.allFinite()) throw std::runtime_error("fit_wls: irrecoverable rank deficiency");
  return w;
}

Eigen::VectorXd fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return fit_wls(X, y, Eigen::VectorXd::Ones(X.rows()));
}

}  // namespace epf
