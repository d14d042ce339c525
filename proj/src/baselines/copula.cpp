#include "epf/baselines/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "epf/math.hpp"

namespace epf {

Eigen::MatrixXd repair_correlation(Eigen::MatrixXd a, double min_eigenvalue) {
  if (a.rows() != a.cols()) throw std::invalid_argument("repair_correlation: square matrix only");
  const Eigen::Index d = a.rows();
  a = 0.5 * (a + a.transpose()).eval();

  for (int iter = 0; iter < 100; ++iter) {
    bool unit_diag = true;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(a(i, i) - 1.0) > 1e-14) unit_diag = false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    if (eig.info() != Eigen::Success) throw std::runtime_error("repair_correlation: eig failed");
    if (unit_diag && eig.eigenvalues().minCoeff() >= min_eigenvalue) return a;

    Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(min_eigenvalue);
    a = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::VectorXd scale = a.diagonal().cwiseSqrt().cwiseInverse();
    a = (scale.asDiagonal() * a * scale.asDiagonal()).eval();
    a = 0.5 * (a + a.transpose()).eval();
    for (Eigen::Index i = 0; i < d; ++i) a(i, i) = 1.0;
  }
  return a;
}

namespace {

// Average ranks (1-based), ties averaged.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd jittered = a;
  jittered.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(jittered);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("cholesky_with_jitter: matrix not positive definite after repair");
  }
  return llt.matrixL();
}

}  // namespace

CopulaModel fit_gaussian_copula(const Eigen::MatrixXd& residuals) {
  const Eigen::Index n = residuals.rows();
  const Eigen::Index d = residuals.cols();
  if (n < 30) throw std::invalid_argument("fit_gaussian_copula: need at least 30 training days");
  if (!residuals.allFinite()) {
    throw std::invalid_argument("fit_gaussian_copula: non-finite residual");
  }

  Eigen::MatrixXd scores(n, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::VectorXd ranks = average_ranks(residuals.col(c));
    for (Eigen::Index r = 0; r < n; ++r) {
      scores(r, c) = norm_quantile(ranks[r] / static_cast<double>(n + 1));
    }
  }

  // Sample correlation of the normal scores.
  Eigen::RowVectorXd mean = scores.colwise().mean();
  scores.rowwise() -= mean;
  Eigen::MatrixXd cov = scores.transpose() * scores / static_cast<double>(n);
  Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(sd[i] > 0.0)) sd[i] = 1.0;  // constant column: leave it uncorrelated
  }
  Eigen::MatrixXd corr = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
  for (Eigen::Index i = 0; i < d; ++i) corr(i, i) = 1.0;

  CopulaModel model;
  model.correlation = repair_correlation(std::move(corr));
  model.chol = cholesky_with_jitter(model.correlation);
  return model;
}

Eigen::MatrixXd copula_sample(const std::vector<MarginalForecast>& marginals,
                              const CopulaModel& copula, int num_samples, Rng& rng) {
  const int d = copula.dims();
  if (static_cast<int>(marginals.size()) != d) {
    throw std::invalid_argument("copula_sample: marginal count mismatch");
  }
  if (num_samples < 1) throw std::invalid_argument("copula_sample: need S >= 1");

  Eigen::MatrixXd out(num_samples, d);
  Eigen::VectorXd g(d);
  for (int s = 0; s < num_samples; ++s) {
    for (int i = 0; i < d; ++i) g[i] = rng.normal();
    const Eigen::VectorXd n = copula.chol * g;
    for (int i = 0; i < d; ++i) {
      // clamp away from {0,1}: erfc underflows for |n| beyond ~8.3
      const double p = std::clamp(norm_cdf(n[i]), 1e-16, 1.0 - 1e-16);
      out(s, i) = marginals[static_cast<std::size_t>(i)].inverse_cdf(p);
    }
  }
  return out;
}

}  // namespace epf
