#pragma once

#include <string>
#include <vector>

namespace epf {

// Mean and standard deviation over repeated runs; deterministic methods have
// exactly zero std. Population convention, so a single repeat reports 0.
struct MethodScores {
  std::string method;
  double es_mean = 0.0, es_std = 0.0;
  double crps_mean = 0.0, crps_std = 0.0;
  double rmse_mean = 0.0, rmse_std = 0.0;

  bool operator==(const MethodScores&) const = default;
};

struct ExpertScores {
  std::string name;
  double mae = 0.0;
  double rmse = 0.0;

  bool operator==(const ExpertScores&) const = default;
};

struct ScoreReport {
  std::vector<MethodScores> methods;
  std::vector<ExpertScores> experts;

  bool operator==(const ScoreReport&) const = default;
};

void write_report_csv(const ScoreReport& report, const std::string& path);
ScoreReport read_report_csv(const std::string& path);

// "metric x method" table with mean +/- std at 3 decimals, plus the expert
// MAE/RMSE table when present.
std::string format_report(const ScoreReport& report);

// mean +/- std over repeats, population convention.
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace epf
