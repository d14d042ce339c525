#include "epf/baselines/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epf/math.hpp"

namespace epf {

std::vector<double> dense_tau_grid() {
  std::vector<double> taus(99);
  for (int i = 0; i < 99; ++i) taus[i] = (i + 1) / 100.0;
  return taus;
}

MarginalForecast MarginalForecast::from_quantiles(std::span<const double> taus,
                                                  std::span<const double> values) {
  if (taus.size() != values.size() || taus.size() < 2) {
    throw std::invalid_argument("MarginalForecast: need matching tau/value grids of size >= 2");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0 && taus[i] < 1.0)) {
      throw std::invalid_argument("MarginalForecast: taus must lie in (0,1)");
    }
    if (i > 0 && !(taus[i] > taus[i - 1])) {
      throw std::invalid_argument("MarginalForecast: taus must be strictly increasing");
    }
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("MarginalForecast: non-finite quantile value");
    }
  }
  MarginalForecast m;
  m.kind_ = Kind::quantile_grid;
  m.taus_.assign(taus.begin(), taus.end());
  m.values_.assign(values.begin(), values.end());
  std::sort(m.values_.begin(), m.values_.end());
  return m;
}

MarginalForecast MarginalForecast::gaussian(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma)) {
    throw std::invalid_argument("MarginalForecast: sigma must be positive and finite");
  }
  MarginalForecast m;
  m.kind_ = Kind::gaussian;
  m.mu_ = mu;
  m.sigma_ = sigma;
  return m;
}

double MarginalForecast::inverse_cdf(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("inverse_cdf: p must lie in (0,1)");
  }
  if (kind_ == Kind::gaussian) return mu_ + sigma_ * norm_quantile(p);

  const std::size_t n = taus_.size();
  const double inner_range = values_.back() - values_.front();
  const double cap = 5.0 * inner_range;
  if (p <= taus_.front()) {
    const double slope = (values_[1] - values_[0]) / (taus_[1] - taus_[0]);
    const double v = values_.front() - slope * (taus_.front() - p);
    return std::max(v, values_.front() - cap);
  }
  if (p >= taus_.back()) {
    const double slope = (values_[n - 1] - values_[n - 2]) / (taus_[n - 1] - taus_[n - 2]);
    const double v = values_.back() + slope * (p - taus_.back());
    return std::min(v, values_.back() + cap);
  }
  const auto it = std::upper_bound(taus_.begin(), taus_.end(), p);
  const std::size_t hi = static_cast<std::size_t>(it - taus_.begin());
  const std::size_t lo = hi - 1;
  const double t = (p - taus_[lo]) / (taus_[hi] - taus_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

double MarginalForecast::cdf(double x) const {
  if (kind_ == Kind::gaussian) return norm_cdf((x - mu_) / sigma_);

  // Piecewise-linear inverse of inverse_cdf; flat segments map to the upper
  // end of their tau span.
  const std::size_t n = taus_.size();
  if (x <= inverse_cdf_floor()) return 0.0;
  if (x >= inverse_cdf_ceil()) return 1.0;
  if (x < values_.front()) {
    const double slope = (values_[1] - values_[0]) / (taus_[1] - taus_[0]);
    if (slope <= 0.0) return taus_.front();
    return std::max(0.0, taus_.front() - (values_.front() - x) / slope);
  }
  if (x > values_.back()) {
    const double slope = (values_[n - 1] - values_[n - 2]) / (taus_[n - 1] - taus_[n - 2]);
    if (slope <= 0.0) return taus_.back();
    return std::min(1.0, taus_.back() + (x - values_.back()) / slope);
  }
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - values_.begin());
  if (hi == 0) return taus_.front();
  if (hi >= n) return taus_.back();
  const std::size_t lo = hi - 1;
  if (values_[hi] == values_[lo]) return taus_[hi];
  const double t = (x - values_[lo]) / (values_[hi] - values_[lo]);
  return taus_[lo] + t * (taus_[hi] - taus_[lo]);
}

double MarginalForecast::inverse_cdf_floor() const {
  const double cap = 5.0 * (values_.back() - values_.front());
  return values_.front() - cap;
}

double MarginalForecast::inverse_cdf_ceil() const {
  const double cap = 5.0 * (values_.back() - values_.front());
  return values_.back() + cap;
}

MarginalForecast quantiles_to_marginal(std::span<const double> taus,
                                       std::span<const double> values) {
  return MarginalForecast::from_quantiles(taus, values);
}

}  // namespace epf
