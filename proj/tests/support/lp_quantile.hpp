#pragma once

// Exact LP solver for linear quantile regression, used only as a test
// oracle. min sum_i tau*u_i + (1-tau)*v_i  s.t.  X b + u - v = y, u,v >= 0,
// b free (split into b+ - b-). Dense primal simplex; the all-(u or v)
// starting basis is immediately feasible. Independent of the IRLS fit path.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace epf::test_support {

struct LpQuantileResult {
  Eigen::VectorXd beta;
  double objective = 0.0;  // total (not mean) pinball loss
};

inline LpQuantileResult lp_quantile_regression(const Eigen::MatrixXd& X,
                                               const Eigen::VectorXd& y, double tau) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const int ncols = 2 * p + 2 * n;
  constexpr double tol = 1e-9;

  // columns: [b+ (p), b- (p), u (n), v (n)], then rhs
  Eigen::MatrixXd T(n, ncols + 1);
  Eigen::VectorXd cost(ncols);
  cost.setZero();
  for (int i = 0; i < n; ++i) {
    cost[2 * p + i] = tau;
    cost[2 * p + n + i] = 1.0 - tau;
  }

  std::vector<int> basis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double sign = y[i] >= 0.0 ? 1.0 : -1.0;
    T.row(i).head(p) = sign * X.row(i);
    T.row(i).segment(p, p) = -sign * X.row(i);
    T.row(i).segment(2 * p, n).setZero();
    T.row(i).segment(2 * p + n, n).setZero();
    T(i, 2 * p + i) = sign;
    T(i, 2 * p + n + i) = -sign;
    T(i, ncols) = sign * y[i];
    basis[static_cast<std::size_t>(i)] = y[i] >= 0.0 ? 2 * p + i : 2 * p + n + i;
  }

  Eigen::VectorXd reduced(ncols);
  for (long iter = 0; iter < 200000; ++iter) {
    // reduced costs r = c - c_B' T
    Eigen::VectorXd cb(n);
    for (int i = 0; i < n; ++i) cb[i] = cost[basis[static_cast<std::size_t>(i)]];
    reduced = cost - T.leftCols(ncols).transpose() * cb;

    int enter = -1;
    if (iter < 20000) {  // Dantzig, then Bland to guarantee termination
      double best = -tol;
      for (int j = 0; j < ncols; ++j) {
        if (reduced[j] < best) {
          best = reduced[j];
          enter = j;
        }
      }
    } else {
      for (int j = 0; j < ncols; ++j) {
        if (reduced[j] < -tol) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) {
      LpQuantileResult result;
      result.beta.resize(p);
      result.beta.setZero();
      result.objective = 0.0;
      for (int i = 0; i < n; ++i) {
        const int b = basis[static_cast<std::size_t>(i)];
        const double val = T(i, ncols);
        result.objective += cost[b] * val;
        if (b < p) result.beta[b] += val;
        else if (b < 2 * p) result.beta[b - p] -= val;
      }
      return result;
    }

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
      if (T(i, enter) > tol) {
        const double ratio = T(i, ncols) / T(i, enter);
        if (leave < 0 || ratio < best_ratio - tol ||
            (std::abs(ratio - best_ratio) <= tol &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("lp_quantile_regression: unbounded");

    T.row(leave) /= T(leave, enter);
    for (int i = 0; i < n; ++i) {
      if (i != leave && std::abs(T(i, enter)) > 0.0) {
        T.row(i) -= T(i, enter) * T.row(leave);
      }
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  throw std::runtime_error("lp_quantile_regression: iteration limit");
}

}  // namespace epf::test_support
