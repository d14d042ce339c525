#pragma once

#include <string>
#include <vector>

#include "epf/dataset.hpp"
#include "epf/ensemble/experts.hpp"
#include "epf/igep.hpp"

namespace epf {

struct RollingConfig {
  int window_days = 365;
  int refit_every = 1;  // days between reestimations
  bool gb_positive_kernel = false;
};

// Expert member order used everywhere downstream.
const std::vector<std::string>& expert_names();

// Fits all five experts on the trailing window and predicts every day in
// [start, end], advancing (and by default refitting) one day at a time.
std::vector<EnsembleForecast> rolling_forecast(const MarketDataset& data, Date start, Date end,
                                               const RollingConfig& cfg = {});

struct ExpertMetrics {
  std::vector<std::string> names;  // members then "avg"
  std::vector<double> mae;
  std::vector<double> rmse;
};

ExpertMetrics expert_metrics(const std::vector<EnsembleForecast>& forecasts,
                             const MarketDataset& data);

// CSV: date,hour,<members...>,avg,actual_price
void write_forecasts_csv(const std::vector<EnsembleForecast>& forecasts,
                         const MarketDataset& data, const std::string& path);
std::vector<EnsembleForecast> read_forecasts_csv(const std::string& path);

}  // namespace epf
