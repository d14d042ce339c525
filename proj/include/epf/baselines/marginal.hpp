#pragma once

#include <span>
#include <vector>

namespace epf {

// Univariate predictive distribution: either a dense quantile grid with
// interpolated inverse CDF, or a Gaussian. Quantile values are rearranged
// (sorted) on construction, which repairs quantile crossing and never
// worsens pinball loss.
class MarginalForecast {
 public:
  enum class Kind { quantile_grid, gaussian };

  static MarginalForecast from_quantiles(std::span<const double> taus,
                                         std::span<const double> values);
  static MarginalForecast gaussian(double mu, double sigma);

  Kind kind() const { return kind_; }
  const std::vector<double>& taus() const { return taus_; }
  const std::vector<double>& values() const { return values_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  // Non-decreasing on (0,1). Outside the grid the adjacent segment slope is
  // extended linearly, capped at 5x the inner inter-quantile range.
  double inverse_cdf(double p) const;
  double cdf(double x) const;

 private:
  MarginalForecast() = default;
  double inverse_cdf_floor() const;
  double inverse_cdf_ceil() const;
  Kind kind_ = Kind::gaussian;
  std::vector<double> taus_;
  std::vector<double> values_;
  double mu_ = 0.0;
  double sigma_ = 1.0;
};

// 99-point grid 0.01 .. 0.99.
std::vector<double> dense_tau_grid();

MarginalForecast quantiles_to_marginal(std::span<const double> taus,
                                       std::span<const double> values);

}  // namespace epf
