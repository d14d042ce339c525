#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "epf/dates.hpp"

namespace epf {

struct HourlyRecord {
  double price;          // EUR/MWh
  double load;           // MW
  double wind;           // MW
  double pv;             // MW
  double residual_load;  // MW, load - wind - pv
};

// Day x hour panel of prices and fundamentals. Contiguous days, exactly 24
// records per day, no missing values. Immutable after construction.
class MarketDataset {
 public:
  static constexpr int kHoursPerDay = 24;

  MarketDataset(Date first_day, std::vector<HourlyRecord> records);

  int num_days() const { return static_cast<int>(records_.size() / kHoursPerDay); }
  Date first_day() const { return first_day_; }
  Date day(int day_index) const { return first_day_ + day_index; }
  // -1 when the date is outside the panel.
  int index_of(Date d) const;

  const HourlyRecord& at(int day_index, int hour) const {
    return records_[static_cast<std::size_t>(day_index) * kHoursPerDay + hour];
  }
  double price(int day_index, int hour) const { return at(day_index, hour).price; }
  double residual_load(int day_index, int hour) const {
    return at(day_index, hour).residual_load;
  }

  std::vector<double> prices(int first_day_index, int num_days) const;

  const std::vector<HourlyRecord>& records() const { return records_; }

 private:
  Date first_day_;
  std::vector<HourlyRecord> records_;  // day-major, 24 per day
};

enum class MissingPolicy { reject, forward_fill };

struct CsvSchema {
  std::string timestamp = "timestamp";
  std::string price = "price";
  std::string load = "load_forecast";
  std::string wind = "wind_forecast";
  std::string pv = "solar_forecast";
  MissingPolicy missing = MissingPolicy::reject;
};

// Reads an hourly CSV (header row, ISO-8601 timestamps) into a dataset.
// Throws std::runtime_error with the offending line number or date on
// malformed rows and incomplete days.
MarketDataset ingest_csv(const std::string& path, const CsvSchema& schema = {});

// Writes the dataset back out in the same CSV layout ingest_csv expects.
void write_csv(const MarketDataset& data, const std::string& path);

// Scalar price standardizer, population convention.
class Standardizer {
 public:
  Standardizer(double mean, double std);
  static Standardizer fit(std::span<const double> prices);

  double mean() const { return mean_; }
  double std() const { return std_; }
  double apply(double y) const { return (y - mean_) / std_; }
  double invert(double v) const { return v * std_ + mean_; }

 private:
  double mean_;
  double std_;
};

inline double asinh_transform(double y) { return std::asinh(y); }
inline double sinh_inverse(double y_tilde) { return std::sinh(y_tilde); }

}  // namespace epf
