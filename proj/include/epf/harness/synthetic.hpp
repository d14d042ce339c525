#pragma once

#include <cstdint>

#include "epf/dataset.hpp"
#include "epf/dates.hpp"

namespace epf {

// Synthetic day-ahead market data. Prices are a smooth nonlinear function of
// residual load plus calendar effects, disturbed by a persistent day-level
// component and hourly noise whose scale follows a latent dispersion driver.
// Lag-based experts partially track the day-level component while
// fundamentals-only experts cannot, so the ensemble spread carries real
// information about how large the next error is likely to be.
struct SyntheticConfig {
  int years = 3;  // 365-day years
  Date start = Date::from_ymd(2015, 1, 1);
  std::uint64_t seed = 42;

  // fundamentals, MW
  double base_load = 58000.0;
  double wind_capacity = 16000.0;
  double pv_capacity = 28000.0;

  // price curve, EUR/MWh over z-scored residual load
  double price_level = 34.0;
  double price_slope = 11.0;
  double price_cubic = 2.2;

  // error structure (all scaled by noise_scale)
  double noise_scale = 1.0;
  double dispersion_persistence = 0.90;  // AR(1) of the log dispersion driver
  double dispersion_volatility = 0.55;
  double level_persistence = 0.85;       // AR(1) of the day-level price shift
  double level_innovation = 5.0;         // EUR/MWh, scaled by the driver
  double hourly_noise = 2.2;             // EUR/MWh, scaled by the driver
};

MarketDataset generate_synthetic(const SyntheticConfig& cfg);

// Deterministic part of the price: with noise_scale == 0 every price equals
// this function of its own residual load and calendar cell.
double synthetic_price_mean(double residual_load, int weekday, int hour,
                            const SyntheticConfig& cfg);

}  // namespace epf
