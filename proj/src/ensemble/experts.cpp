#include "epf/ensemble/experts.hpp"

#include <cmath>
#include <stdexcept>

#include "epf/ensemble/wls.hpp"

namespace epf {

int LinearExpertSpec::feature_count() const {
  return (intercept ? 1 : 0) + rl_poly_degree + static_cast<int>(price_lags.size()) +
         static_cast<int>(rl_lags.size()) + (hour_dummies ? 24 : 0);
}

int LinearExpertSpec::max_lag() const {
  int m = 0;
  for (int l : price_lags) m = std::max(m, l);
  for (int l : rl_lags) m = std::max(m, l);
  return m;
}

Eigen::VectorXd build_features(const MarketDataset& data, const LinearExpertSpec& spec,
                               int day_index, int hour, const FeatureContext& ctx) {
  if (day_index - spec.max_lag() < 0) {
    throw std::invalid_argument("build_features: day " + data.day(day_index).str() +
                                " lacks lag " + std::to_string(spec.max_lag()));
  }
  Eigen::VectorXd f(spec.feature_count());
  int k = 0;
  if (spec.intercept) f[k++] = 1.0;
  const double z = (data.residual_load(day_index, hour) - ctx.rl_mean) / ctx.rl_sd;
  double p = 1.0;
  for (int deg = 1; deg <= spec.rl_poly_degree; ++deg) {
    p *= z;
    f[k++] = p;
  }
  for (int lag : spec.price_lags) {
    const double y = data.price(day_index - lag, hour);
    f[k++] = spec.transform == TargetTransform::asinh ? asinh_transform(y) : y;
  }
  for (int lag : spec.rl_lags) f[k++] = data.residual_load(day_index - lag, hour);
  if (spec.hour_dummies) {
    for (int h = 0; h < 24; ++h) f[k++] = h == hour ? 1.0 : 0.0;
  }
  return f;
}

LinearExpertSpec arx_m_spec() {
  LinearExpertSpec s;
  s.name = "arx_m";
  s.transform = TargetTransform::asinh;
  s.per_hour = true;
  s.intercept = true;
  s.price_lags = {1, 2, 7};
  s.rl_lags = {1, 2, 7};
  return s;
}

LinearExpertSpec arx_u_spec() {
  LinearExpertSpec s;
  s.name = "arx_u";
  s.transform = TargetTransform::asinh;
  s.per_hour = false;
  s.intercept = false;
  s.price_lags = {1, 2, 7};
  s.rl_lags = {1, 2, 7};
  s.hour_dummies = true;
  return s;
}

LinearExpertSpec poly_lr_spec() {
  LinearExpertSpec s;
  s.name = "poly_lr";
  s.transform = TargetTransform::none;
  s.per_hour = false;
  s.intercept = false;
  s.rl_poly_degree = 3;
  s.hour_dummies = true;
  s.temporal_kernel = -0.01;
  return s;
}

namespace {

FeatureContext window_context(const MarketDataset& data, int first, int days, bool standardize) {
  FeatureContext ctx;
  if (!standardize) return ctx;
  double s = 0.0, s2 = 0.0;
  const double n = static_cast<double>(days) * MarketDataset::kHoursPerDay;
  for (int d = first; d < first + days; ++d) {
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      const double rl = data.residual_load(d, h);
      s += rl;
      s2 += rl * rl;
    }
  }
  ctx.rl_mean = s / n;
  const double var = s2 / n - ctx.rl_mean * ctx.rl_mean;
  ctx.rl_sd = var > 0.0 ? std::sqrt(var) : 1.0;
  return ctx;
}

void check_window(const MarketDataset& data, int first, int days, int max_lag) {
  if (first < 0 || days < 30 || first + days > data.num_days()) {
    throw std::invalid_argument("fit_expert: window must cover >= 30 days inside the dataset");
  }
  if (first + days - 1 < max_lag) {
    throw std::invalid_argument("fit_expert: window too early for required lags");
  }
}

// exp(kernel * (anchor - d)^2) per window day, normalized so the largest
// weight is 1; keeps the positive-sign kernel variant from overflowing.
Eigen::VectorXd day_weights(int anchor, int first, int n, double kernel) {
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) {
    const double dd = static_cast<double>(anchor - (first + i));
    e[i] = kernel * dd * dd;
  }
  return (e.array() - e.maxCoeff()).exp();
}

double target_value(const MarketDataset& data, const LinearExpertSpec& spec, int d, int h) {
  const double y = data.price(d, h);
  return spec.transform == TargetTransform::asinh ? asinh_transform(y) : y;
}

class LinearExpert final : public Expert {
 public:
  LinearExpert(LinearExpertSpec spec, FeatureContext ctx, std::vector<Eigen::VectorXd> coeffs)
      : spec_(std::move(spec)), ctx_(ctx), coeffs_(std::move(coeffs)) {}

  const std::string& name() const override { return spec_.name; }

  Eigen::VectorXd predict_day(const MarketDataset& data, int day_index) const override {
    Eigen::VectorXd out(MarketDataset::kHoursPerDay);
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      const Eigen::VectorXd f = build_features(data, spec_, day_index, h, ctx_);
      const double raw = coeffs_[spec_.per_hour ? h : 0].dot(f);
      out[h] = spec_.transform == TargetTransform::asinh ? sinh_inverse(raw) : raw;
    }
    return out;
  }

 private:
  LinearExpertSpec spec_;
  FeatureContext ctx_;
  std::vector<Eigen::VectorXd> coeffs_;  // one per hour, or a single pooled fit
};

class LwLrExpert final : public Expert {
 public:
  LwLrExpert(LwLrSpec spec, FeatureContext ctx, int first, int days)
      : spec_(spec), ctx_(ctx), first_(first), days_(days) {}

  const std::string& name() const override { return name_; }

  // One local weighted fit of price on z-scored residual load per query
  // point, weighted by temporal distance and residual-load distance.
  Eigen::VectorXd predict_day(const MarketDataset& data, int day_index) const override {
    Eigen::VectorXd out(MarketDataset::kHoursPerDay);
#pragma omp parallel for schedule(static)
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      const double zq = (data.residual_load(day_index, h) - ctx_.rl_mean) / ctx_.rl_sd;
      // 2 x 2 weighted normal equations, accumulated in one pass
      double sw = 0.0, swz = 0.0, swzz = 0.0, swy = 0.0, swzy = 0.0;
      for (int d = first_; d < first_ + days_; ++d) {
        const double dd = static_cast<double>(day_index - d);
        const double wt_time = spec_.temporal_kernel * dd * dd;
        for (int hh = 0; hh < MarketDataset::kHoursPerDay; ++hh) {
          const double z = (data.residual_load(d, hh) - ctx_.rl_mean) / ctx_.rl_sd;
          const double dz = zq - z;
          const double w = std::exp(wt_time + spec_.rl_distance_kernel * dz * dz);
          const double y = data.price(d, hh);
          sw += w;
          swz += w * z;
          swzz += w * z * z;
          swy += w * y;
          swzy += w * z * y;
        }
      }
      const double det = sw * swzz - swz * swz;
      if (std::abs(det) < 1e-12 * (1.0 + sw * swzz)) {
        out[h] = sw > 0.0 ? swy / sw : 0.0;  // locally flat: weighted mean
      } else {
        const double w1 = (sw * swzy - swz * swy) / det;
        const double w0 = (swy - w1 * swz) / sw;
        out[h] = w0 + w1 * zq;
      }
    }
    return out;
  }

 private:
  std::string name_ = "lw_lr";
  LwLrSpec spec_;
  FeatureContext ctx_;
  int first_, days_;
};

class GbExpert final : public Expert {
 public:
  GbExpert(GbdtModel model) : model_(std::move(model)) {}

  const std::string& name() const override { return name_; }

  Eigen::VectorXd predict_day(const MarketDataset& data, int day_index) const override {
    Eigen::VectorXd out(MarketDataset::kHoursPerDay);
    Eigen::RowVectorXd f(25);
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      f.setZero();
      f[0] = data.residual_load(day_index, h);
      f[1 + h] = 1.0;
      out[h] = model_.predict(f);
    }
    return out;
  }

 private:
  std::string name_ = "gb";
  GbdtModel model_;
};

}  // namespace

std::unique_ptr<Expert> fit_linear_expert(const MarketDataset& data, int window_first,
                                          int window_days, int anchor_day,
                                          const LinearExpertSpec& spec) {
  check_window(data, window_first, window_days, spec.max_lag());
  const FeatureContext ctx =
      window_context(data, window_first, window_days, spec.rl_poly_degree >= 2);

  const int row_first = std::max(window_first, spec.max_lag());
  const int num_days = window_first + window_days - row_first;
  if (num_days < spec.feature_count() + 2) {
    throw std::invalid_argument("fit_expert: too few usable days after lag trimming");
  }

  const Eigen::VectorXd wd = day_weights(anchor_day, row_first, num_days, spec.temporal_kernel);

  std::vector<Eigen::VectorXd> coeffs;
  if (spec.per_hour) {
    coeffs.resize(24);
#pragma omp parallel for schedule(static)
    for (int h = 0; h < 24; ++h) {
      Eigen::MatrixXd X(num_days, spec.feature_count());
      Eigen::VectorXd y(num_days);
      for (int i = 0; i < num_days; ++i) {
        const int d = row_first + i;
        X.row(i) = build_features(data, spec, d, h, ctx).transpose();
        y[i] = target_value(data, spec, d, h);
      }
      coeffs[h] = fit_wls(X, y, wd);
    }
  } else {
    const int rows = num_days * 24;
    Eigen::MatrixXd X(rows, spec.feature_count());
    Eigen::VectorXd y(rows), w(rows);
    int i = 0;
    for (int d = row_first; d < row_first + num_days; ++d) {
      for (int h = 0; h < 24; ++h, ++i) {
        X.row(i) = build_features(data, spec, d, h, ctx).transpose();
        y[i] = target_value(data, spec, d, h);
        w[i] = wd[d - row_first];
      }
    }
    coeffs.push_back(fit_wls(X, y, w));
  }
  return std::make_unique<LinearExpert>(spec, ctx, std::move(coeffs));
}

std::unique_ptr<Expert> fit_lw_lr_expert(const MarketDataset& data, int window_first,
                                         int window_days, const LwLrSpec& spec) {
  check_window(data, window_first, window_days, 0);
  const FeatureContext ctx = window_context(data, window_first, window_days, true);
  return std::make_unique<LwLrExpert>(spec, ctx, window_first, window_days);
}

std::unique_ptr<Expert> fit_gb_expert(const MarketDataset& data, int window_first,
                                      int window_days, int anchor_day, const GbExpertSpec& spec) {
  check_window(data, window_first, window_days, 0);
  const int rows = window_days * 24;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(rows, 25);
  Eigen::VectorXd y(rows), w(rows);
  const double kernel = spec.positive_kernel ? -spec.temporal_kernel : spec.temporal_kernel;
  const Eigen::VectorXd wd = day_weights(anchor_day, window_first, window_days, kernel);
  int i = 0;
  for (int d = window_first; d < window_first + window_days; ++d) {
    for (int h = 0; h < 24; ++h, ++i) {
      X(i, 0) = data.residual_load(d, h);
      X(i, 1 + h) = 1.0;
      y[i] = data.price(d, h);
      w[i] = wd[d - window_first];
    }
  }
  std::vector<bool> is_binary(25, true);
  is_binary[0] = false;
  GbdtModel model;
  model.fit(X, y, w, is_binary, spec.gbdt);
  return std::make_unique<GbExpert>(std::move(model));
}

}  // namespace epf
