#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "epf/dataset.hpp"
#include "epf/ensemble/gbdt.hpp"

namespace epf {

enum class TargetTransform { none, asinh };

// Declarative description of a linear point-forecasting expert. Features are
// assembled in a fixed order: intercept, current-day residual-load powers,
// price lags (on the target scale), residual-load lags, hour dummies.
struct LinearExpertSpec {
  std::string name;
  TargetTransform transform = TargetTransform::none;
  bool per_hour = false;  // 24 separate fits instead of one pooled fit
  bool intercept = true;
  int rl_poly_degree = 1;        // >= 2 z-scores RL over the window first
  std::vector<int> price_lags;   // days, strictly past
  std::vector<int> rl_lags;      // days, strictly past
  bool hour_dummies = false;
  double temporal_kernel = 0.0;  // weight exponent coefficient on (d - d_i)^2

  int feature_count() const;
  int max_lag() const;
};

// Window statistics needed to assemble features (z-scoring of residual load
// for polynomial terms). Identity when unused.
struct FeatureContext {
  double rl_mean = 0.0;
  double rl_sd = 1.0;
};

Eigen::VectorXd build_features(const MarketDataset& data, const LinearExpertSpec& spec,
                               int day_index, int hour, const FeatureContext& ctx = {});

// The five experts of the point-forecasting ensemble.
LinearExpertSpec arx_m_spec();
LinearExpertSpec arx_u_spec();
LinearExpertSpec poly_lr_spec();

struct LwLrSpec {
  double temporal_kernel = -0.01;
  // Applied to residual load z-scored over the window; the raw-MW scale
  // would collapse every weight to zero.
  double rl_distance_kernel = -10.0;
};

struct GbExpertSpec {
  GbdtSpec gbdt;
  double temporal_kernel = -0.01;  // sign selectable; see positive_kernel
  bool positive_kernel = false;
};

// A fitted expert predicts all 24 hours of one day. Fitting sees only the
// window; prediction reads day-d residual load (exogenous, known day-ahead)
// and strictly past prices.
class Expert {
 public:
  virtual ~Expert() = default;
  virtual const std::string& name() const = 0;
  virtual Eigen::VectorXd predict_day(const MarketDataset& data, int day_index) const = 0;
};

std::unique_ptr<Expert> fit_linear_expert(const MarketDataset& data, int window_first,
                                          int window_days, int anchor_day,
                                          const LinearExpertSpec& spec);
std::unique_ptr<Expert> fit_lw_lr_expert(const MarketDataset& data, int window_first,
                                         int window_days, const LwLrSpec& spec = {});
std::unique_ptr<Expert> fit_gb_expert(const MarketDataset& data, int window_first,
                                      int window_days, int anchor_day,
                                      const GbExpertSpec& spec = {});

}  // namespace epf
