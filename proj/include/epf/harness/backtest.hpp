#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "epf/dataset.hpp"
#include "epf/ensemble/rolling.hpp"
#include "epf/harness/report.hpp"
#include "epf/harness/synthetic.hpp"
#include "epf/igep.hpp"

namespace epf {

enum class Method : int {
  igep = 0,
  raw = 1,
  mge = 2,
  igep_ind = 3,
  qra_copula = 4,
  ngr_ml_copula = 5,
  ngr_crps_copula = 6,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::vector<Method> all_methods();

struct DateRange {
  Date start;
  Date end;  // inclusive
  int days() const { return static_cast<int>(end - start) + 1; }
};

struct BacktestConfig {
  // Input data: a CSV path, or empty to generate the synthetic dataset.
  std::string data_csv;
  SyntheticConfig synthetic;

  // Mirrors the three-way year split: ensemble warm-up, probabilistic-model
  // training, test.
  DateRange ensemble_train{Date::from_ymd(2015, 1, 1), Date::from_ymd(2015, 12, 31)};
  DateRange prob_train{Date::from_ymd(2016, 1, 1), Date::from_ymd(2016, 12, 30)};
  DateRange test{Date::from_ymd(2016, 12, 31), Date::from_ymd(2017, 12, 30)};

  std::vector<Method> methods = all_methods();
  int scenarios_per_day = 1000;
  int repeats = 10;
  std::uint64_t base_seed = 1;
  std::string out_dir = "out/run";

  RollingConfig rolling;
  TrainConfig igep;  // shared by both IGEP variants; seeds set per repeat
  double igep_ind_delta = 2.0;

  // Artifact sizing: per-day scenario CSVs and fan charts are emitted for the
  // first N test days of repeat 0 (set to the test length to emit all).
  int emit_scenario_days = 3;
  int plot_days = 2;

  void validate() const;
  std::string to_json() const;
  static BacktestConfig from_json(const std::string& text);
  static BacktestConfig from_json_file(const std::string& path);
};

struct BacktestResult {
  ScoreReport report;
  // Per-repeat aggregates keyed by method name, in repeat order.
  std::map<std::string, std::vector<double>> es_by_repeat;
  std::map<std::string, std::vector<double>> crps_by_repeat;
  std::map<std::string, std::vector<double>> rmse_by_repeat;
};

// Full pipeline: rolling ensemble forecasts, per-method training (R repeats),
// S scenarios per test day, unbiased scoring, report + artifacts under
// cfg.out_dir. Deterministic given the config. Failures carry the pipeline
// stage in the exception message.
BacktestResult run_backtest(const BacktestConfig& cfg);

// Scenario CSV helpers (header "scenario,h1..h24", full double precision).
void write_scenario_csv(const Eigen::MatrixXd& scenarios, const std::string& path);
Eigen::MatrixXd read_scenario_csv(const std::string& path);

void write_actuals_csv(const MarketDataset& data, const DateRange& range,
                       const std::string& path);
// date -> 24 prices
std::map<std::string, Eigen::VectorXd> read_actuals_csv(const std::string& path);

// Re-scores emitted scenario CSVs of one method against actuals.csv; returns
// (mean ES, mean CRPS) over the days present.
std::pair<double, double> rescore_run(const std::string& run_dir, const std::string& method);

}  // namespace epf
