#pragma once

#include <Eigen/Dense>
#include <string>

#include "epf/igep.hpp"

namespace epf {

// Per-hour max - min across scenarios; the statistic fan-chart width
// assertions are made against.
Eigen::VectorXd scenario_hourly_range(const Eigen::MatrixXd& scenarios);

// 24-hour fan chart: scenario trajectories (thin, colored), ensemble members
// (black), realized price (blue). Output is byte-stable for identical
// inputs. max_drawn limits how many scenario polylines are rendered.
void plot_scenarios(const Eigen::MatrixXd& scenarios, const EnsembleForecast& forecast,
                    const Eigen::VectorXd& actual, const std::string& path, int max_drawn = 120);

}  // namespace epf
