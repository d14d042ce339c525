#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <vector>

namespace epf {

struct NelderMeadOptions {
  int max_evals = 4000;
  double f_tol = 1e-13;
  double initial_step = 0.25;
};

// Downhill simplex with the standard reflection/expansion/contraction
// coefficients. Small and deterministic; fine for the handful of 4-parameter
// fits it is used for.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                   Eigen::VectorXd x0, const NelderMeadOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) {
    const double step = x0[i] != 0.0 ? opt.initial_step * std::abs(x0[i]) : opt.initial_step;
    pts[i + 1][i] += step;
  }
  int evals = 0;
  for (int i = 0; i <= n; ++i) fv[i] = (++evals, f(pts[i]));

  std::vector<int> order(n + 1);
  while (evals < opt.max_evals) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(fv[worst] - fv[best]) <= opt.f_tol * (1.0 + std::abs(fv[best]))) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd refl = centroid + (centroid - pts[worst]);
    const double f_refl = (++evals, f(refl));
    if (f_refl < fv[best]) {
      const Eigen::VectorXd expa = centroid + 2.0 * (centroid - pts[worst]);
      const double f_expa = (++evals, f(expa));
      if (f_expa < f_refl) {
        pts[worst] = expa;
        fv[worst] = f_expa;
      } else {
        pts[worst] = refl;
        fv[worst] = f_refl;
      }
    } else if (f_refl < fv[second]) {
      pts[worst] = refl;
      fv[worst] = f_refl;
    } else {
      const Eigen::VectorXd contr = centroid + 0.5 * (pts[worst] - centroid);
      const double f_contr = (++evals, f(contr));
      if (f_contr < fv[worst]) {
        pts[worst] = contr;
        fv[worst] = f_contr;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          fv[i] = (++evals, f(pts[i]));
        }
      }
    }
  }
  int arg = 0;
  for (int i = 1; i <= n; ++i) {
    if (fv[i] < fv[arg]) arg = i;
  }
  return pts[arg];
}

}  // namespace epf
