#include "epf/baselines/mge.hpp"

#include <stdexcept>

namespace epf {

MgeModel fit_mge(const Eigen::MatrixXd& residuals) {
  const Eigen::Index n = residuals.rows();
  if (n < 2) throw std::invalid_argument("fit_mge: need at least 2 residual vectors");
  if (!residuals.allFinite()) throw std::invalid_argument("fit_mge: non-finite residual");

  Eigen::MatrixXd centered = residuals.rowwise() - residuals.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_mge: eig failed");
  Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(1e-8);
  cov = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();

  MgeModel model;
  model.covariance = cov;
  cov.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("fit_mge: cholesky failed");
  model.chol = llt.matrixL();
  return model;
}

Eigen::MatrixXd sample_mge(const MgeModel& model, const Eigen::VectorXd& xbar, int num_samples,
                           Rng& rng) {
  const int d = model.dims();
  if (xbar.size() != d) throw std::invalid_argument("sample_mge: dimension mismatch");
  if (num_samples < 1) throw std::invalid_argument("sample_mge: need S >= 1");
  Eigen::MatrixXd out(num_samples, d);
  Eigen::VectorXd g(d);
  for (int s = 0; s < num_samples; ++s) {
    for (int i = 0; i < d; ++i) g[i] = rng.normal();
    out.row(s) = (xbar + model.chol * g).transpose();
  }
  return out;
}

}  // namespace epf
