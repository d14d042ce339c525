#include "epf/ensemble/rolling.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace epf {

const std::vector<std::string>& expert_names() {
  static const std::vector<std::string> names = {"arx_m", "arx_u", "poly_lr", "lw_lr", "gb"};
  return names;
}

std::vector<EnsembleForecast> rolling_forecast(const MarketDataset& data, Date start, Date end,
                                               const RollingConfig& cfg) {
  if (cfg.window_days < 30) throw std::invalid_argument("rolling_forecast: window too short");
  if (cfg.refit_every < 1) throw std::invalid_argument("rolling_forecast: refit_every must be >= 1");
  const int first = data.index_of(start);
  const int last = data.index_of(end);
  if (first < 0 || last < 0 || last < first) {
    throw std::invalid_argument("rolling_forecast: target range outside dataset");
  }
  if (first - cfg.window_days < 0) {
    throw std::invalid_argument("rolling_forecast: dataset lacks the training window before " +
                                start.str());
  }

  std::vector<EnsembleForecast> out;
  out.reserve(static_cast<std::size_t>(last - first + 1));

  std::vector<std::unique_ptr<Expert>> experts;
  int fitted_at = -1;
  for (int t = first; t <= last; ++t) {
    if (fitted_at < 0 || t - fitted_at >= cfg.refit_every) {
      const int w_first = t - cfg.window_days;
      experts.clear();
      experts.resize(5);
      GbExpertSpec gb;
      gb.positive_kernel = cfg.gb_positive_kernel;
      // The five fits are independent; GB dominates, so run them concurrently.
#pragma omp parallel for schedule(dynamic)
      for (int e = 0; e < 5; ++e) {
        switch (e) {
          case 0: experts[e] = fit_linear_expert(data, w_first, cfg.window_days, t, arx_m_spec()); break;
          case 1: experts[e] = fit_linear_expert(data, w_first, cfg.window_days, t, arx_u_spec()); break;
          case 2: experts[e] = fit_linear_expert(data, w_first, cfg.window_days, t, poly_lr_spec()); break;
          case 3: experts[e] = fit_lw_lr_expert(data, w_first, cfg.window_days); break;
          case 4: experts[e] = fit_gb_expert(data, w_first, cfg.window_days, t, gb); break;
        }
      }
      fitted_at = t;
    }

    EnsembleForecast f;
    f.day = data.day(t);
    f.model_names = expert_names();
    f.values.resize(MarketDataset::kHoursPerDay, 5);
    for (int e = 0; e < 5; ++e) f.values.col(e) = experts[static_cast<std::size_t>(e)]->predict_day(data, t);
    out.push_back(std::move(f));
  }
  return out;
}

ExpertMetrics expert_metrics(const std::vector<EnsembleForecast>& forecasts,
                             const MarketDataset& data) {
  if (forecasts.empty()) throw std::invalid_argument("expert_metrics: no forecasts");
  const int m = static_cast<int>(forecasts.front().values.cols());
  ExpertMetrics metrics;
  metrics.names = forecasts.front().model_names;
  metrics.names.push_back("avg");
  metrics.mae.assign(static_cast<std::size_t>(m) + 1, 0.0);
  metrics.rmse.assign(static_cast<std::size_t>(m) + 1, 0.0);

  std::size_t n = 0;
  for (const auto& f : forecasts) {
    const int d = data.index_of(f.day);
    if (d < 0) throw std::invalid_argument("expert_metrics: forecast day not in dataset");
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      const double actual = data.price(d, h);
      double avg = 0.0;
      for (int e = 0; e < m; ++e) {
        const double err = f.values(h, e) - actual;
        metrics.mae[e] += std::abs(err);
        metrics.rmse[e] += err * err;
        avg += f.values(h, e);
      }
      avg /= m;
      metrics.mae[m] += std::abs(avg - actual);
      metrics.rmse[m] += (avg - actual) * (avg - actual);
      ++n;
    }
  }
  for (int e = 0; e <= m; ++e) {
    metrics.mae[e] /= static_cast<double>(n);
    metrics.rmse[e] = std::sqrt(metrics.rmse[e] / static_cast<double>(n));
  }
  return metrics;
}

void write_forecasts_csv(const std::vector<EnsembleForecast>& forecasts,
                         const MarketDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_forecasts_csv: cannot open " + path);
  if (forecasts.empty()) throw std::invalid_argument("write_forecasts_csv: no forecasts");
  out << "date,hour";
  for (const auto& n : forecasts.front().model_names) out << "," << n;
  out << ",avg,actual_price\n";
  char buf[64];
  for (const auto& f : forecasts) {
    const int d = data.index_of(f.day);
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      out << f.day.str() << "," << (h + 1);
      for (Eigen::Index e = 0; e < f.values.cols(); ++e) {
        std::snprintf(buf, sizeof(buf), ",%.17g", f.values(h, e));
        out << buf;
      }
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", f.values.row(h).mean(),
                    d >= 0 ? data.price(d, h) : std::numeric_limits<double>::quiet_NaN());
      out << buf;
    }
  }
}

std::vector<EnsembleForecast> read_forecasts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_forecasts_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_forecasts_csv: empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty() && tok.back() == '\r') tok.pop_back();
      header.push_back(tok);
    }
  }
  if (header.size() < 5 || header[0] != "date" || header[1] != "hour") {
    throw std::runtime_error("read_forecasts_csv: unexpected header");
  }
  const int m = static_cast<int>(header.size()) - 4;  // date,hour,...,avg,actual_price
  std::vector<std::string> names(header.begin() + 2, header.begin() + 2 + m);

  std::map<std::string, Eigen::MatrixXd> days;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    if (static_cast<int>(fields.size()) != m + 4) {
      throw std::runtime_error("read_forecasts_csv: bad row width");
    }
    const int hour = std::stoi(fields[1]) - 1;
    auto [it, inserted] = days.try_emplace(fields[0], Eigen::MatrixXd(24, m));
    for (int e = 0; e < m; ++e) it->second(hour, e) = std::stod(fields[2 + e]);
  }
  std::vector<EnsembleForecast> out;
  out.reserve(days.size());
  for (auto& [date, values] : days) {
    EnsembleForecast f;
    f.day = Date::parse(date);
    f.values = std::move(values);
    f.model_names = names;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace epf
