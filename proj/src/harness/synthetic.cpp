#include "epf/harness/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "epf/rng.hpp"

namespace epf {

namespace {

constexpr double kRlRef = 42000.0;
constexpr double kRlScale = 11000.0;

double load_shape(int hour) {
  // double-peaked weekday profile, normalized around 1
  const double t = (hour + 0.5) / 24.0;
  return 0.84 + 0.20 * std::sin(2.0 * std::numbers::pi * (t - 0.30)) +
         0.10 * std::sin(4.0 * std::numbers::pi * (t - 0.18));
}

double pv_shape(int hour) {
  if (hour < 6 || hour > 19) return 0.0;
  const double t = (hour - 6.0) / 13.0;
  const double s = std::sin(std::numbers::pi * t);
  return s * s;
}

double weekly_factor(int weekday) {
  if (weekday == 0) return 0.86;  // Sunday
  if (weekday == 6) return 0.91;  // Saturday
  return 1.0;
}

double annual_factor(int day_of_year) {
  return 1.0 + 0.11 * std::cos(2.0 * std::numbers::pi * (day_of_year - 15.0) / 365.0);
}

}  // namespace

double synthetic_price_mean(double residual_load, int weekday, int hour,
                            const SyntheticConfig& cfg) {
  const double z = (residual_load - kRlRef) / kRlScale;
  double p = cfg.price_level + cfg.price_slope * z + cfg.price_cubic * z * z * z;
  p += 1.6 * std::sin(2.0 * std::numbers::pi * (hour + 0.5) / 24.0 - 1.1);
  if (weekday == 0 || weekday == 6) p -= 1.8;
  return p;
}

MarketDataset generate_synthetic(const SyntheticConfig& cfg) {
  const int days = cfg.years * 365;
  Rng rng(cfg.seed);

  std::vector<HourlyRecord> records;
  records.reserve(static_cast<std::size_t>(days) * 24);

  double load_ar = 0.0;    // slow day-level load factor
  double wind_ar = 0.0;    // wind weather regime
  double cloud_ar = 0.0;   // pv cloudiness regime
  double log_disp = 0.0;   // latent dispersion driver
  double level = 0.0;      // persistent day-level price shift

  for (int d = 0; d < days; ++d) {
    const Date date = cfg.start + d;
    const int wd = date.weekday();
    const int doy = d % 365;

    load_ar = 0.92 * load_ar + 0.08 * rng.normal();
    wind_ar = 0.80 * wind_ar + 0.45 * rng.normal();
    cloud_ar = 0.70 * cloud_ar + 0.50 * rng.normal();

    log_disp = cfg.dispersion_persistence * log_disp +
               cfg.dispersion_volatility * rng.normal();
    const double disp = std::exp(log_disp - 0.5 * cfg.dispersion_volatility *
                                                cfg.dispersion_volatility /
                                                (1.0 - cfg.dispersion_persistence *
                                                           cfg.dispersion_persistence));
    level = cfg.level_persistence * level + cfg.level_innovation * disp * rng.normal();

    const double wind_day = cfg.wind_capacity / (1.0 + std::exp(-(wind_ar - 0.25)));
    const double pv_day = 0.25 + 0.75 / (1.0 + std::exp(-cloud_ar));
    const double pv_season = 0.65 + 0.35 * std::cos(2.0 * std::numbers::pi * (doy - 172.0) / 365.0 + std::numbers::pi);

    for (int h = 0; h < 24; ++h) {
      HourlyRecord r{};
      r.load = cfg.base_load * annual_factor(doy) * weekly_factor(wd) * load_shape(h) *
               std::exp(0.04 * load_ar + 0.01 * rng.normal());
      r.wind = wind_day * (0.75 + 0.25 / (1.0 + std::exp(-(wind_ar + 0.35 * rng.normal()))));
      r.pv = cfg.pv_capacity * pv_season * pv_shape(h) * pv_day;
      r.residual_load = r.load - r.wind - r.pv;

      const double z = (r.residual_load - kRlRef) / kRlScale;
      const double sigma = (cfg.hourly_noise + 0.9 * std::abs(z)) * disp;
      r.price = synthetic_price_mean(r.residual_load, wd, h, cfg) +
                cfg.noise_scale * (level + sigma * rng.normal());
      records.push_back(r);
    }
  }
  return MarketDataset(cfg.start, std::move(records));
}

}  // namespace epf
