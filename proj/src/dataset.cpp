#include "epf/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "epf/math.hpp"

namespace epf {

MarketDataset::MarketDataset(Date first_day, std::vector<HourlyRecord> records)
    : first_day_(first_day), records_(std::move(records)) {
  if (records_.empty() || records_.size() % kHoursPerDay != 0) {
    throw std::invalid_argument("MarketDataset: record count must be a positive multiple of 24");
  }
  for (const auto& r : records_) {
    if (!std::isfinite(r.price) || !std::isfinite(r.load) || !std::isfinite(r.wind) ||
        !std::isfinite(r.pv) || !std::isfinite(r.residual_load)) {
      throw std::invalid_argument("MarketDataset: non-finite value");
    }
  }
}

int MarketDataset::index_of(Date d) const {
  const std::int64_t idx = d - first_day_;
  if (idx < 0 || idx >= num_days()) return -1;
  return static_cast<int>(idx);
}

std::vector<double> MarketDataset::prices(int first_day_index, int n) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) * kHoursPerDay);
  for (int d = first_day_index; d < first_day_index + n; ++d) {
    for (int h = 0; h < kHoursPerDay; ++h) out.push_back(price(d, h));
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t i = 0;
    while (i < field.size() && field[i] == ' ') ++i;
    out.push_back(field.substr(i));
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("ingest_csv: line " + std::to_string(line_no) +
                             ": invalid number '" + s + "'");
  }
  return v;
}

// Accepts "YYYY-MM-DDTHH:MM[:SS]" and "YYYY-MM-DD HH:MM[:SS]".
std::pair<Date, int> parse_timestamp(const std::string& s, std::size_t line_no) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  const int n = std::sscanf(s.c_str(), "%d-%d-%d%*1[T ]%d:%d:%d", &y, &mo, &d, &h, &mi, &sec);
  if (n < 4 || h < 0 || h > 23) {
    throw std::runtime_error("ingest_csv: line " + std::to_string(line_no) +
                             ": invalid timestamp '" + s + "'");
  }
  return {Date::from_ymd(y, mo, d), h};
}

}  // namespace

MarketDataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest_csv: empty file " + path);
  const auto header = split_line(line);
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("ingest_csv: missing column '" + name + "' in " + path);
  };
  const int c_ts = column(schema.timestamp);
  const int c_price = column(schema.price);
  const int c_load = column(schema.load);
  const int c_wind = column(schema.wind);
  const int c_pv = column(schema.pv);
  const int max_col = std::max({c_ts, c_price, c_load, c_wind, c_pv});

  // day -> hour -> record; validated for completeness afterwards.
  std::map<std::int64_t, std::array<std::pair<bool, HourlyRecord>, 24>> days;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (static_cast<int>(fields.size()) <= max_col) {
      throw std::runtime_error("ingest_csv: line " + std::to_string(line_no) +
                               ": expected at least " + std::to_string(max_col + 1) + " columns");
    }
    const auto [date, hour] = parse_timestamp(fields[c_ts], line_no);
    HourlyRecord rec{};
    rec.price = parse_number(fields[c_price], line_no);
    rec.load = parse_number(fields[c_load], line_no);
    rec.wind = parse_number(fields[c_wind], line_no);
    rec.pv = parse_number(fields[c_pv], line_no);
    rec.residual_load = rec.load - rec.wind - rec.pv;
    days[date.serial()][hour] = {true, rec};
  }
  if (days.empty()) throw std::runtime_error("ingest_csv: no data rows in " + path);

  const Date first = Date::from_serial(days.begin()->first);
  const Date last = Date::from_serial(days.rbegin()->first);
  std::vector<HourlyRecord> records;
  records.reserve(static_cast<std::size_t>(last - first + 1) * 24);
  const HourlyRecord* prev = nullptr;
  for (Date d = first; d <= last; ++d) {
    const auto it = days.find(d.serial());
    for (int h = 0; h < 24; ++h) {
      const bool have = it != days.end() && it->second[h].first;
      if (have) {
        records.push_back(it->second[h].second);
      } else if (schema.missing == MissingPolicy::forward_fill && prev != nullptr) {
        records.push_back(*prev);
      } else {
        throw std::runtime_error("ingest_csv: day " + d.str() + " is missing hour " +
                                 std::to_string(h + 1) + " of 24");
      }
      prev = &records.back();
    }
  }
  return MarketDataset(first, std::move(records));
}

void write_csv(const MarketDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "timestamp,price,load_forecast,wind_forecast,solar_forecast\n";
  char buf[256];
  for (int d = 0; d < data.num_days(); ++d) {
    const std::string day = data.day(d).str();
    for (int h = 0; h < MarketDataset::kHoursPerDay; ++h) {
      const auto& r = data.at(d, h);
      std::snprintf(buf, sizeof(buf), "%s:00:00,%.17g,%.17g,%.17g,%.17g\n",
                    (day + "T" + (h < 10 ? "0" : "") + std::to_string(h)).c_str(), r.price,
                    r.load, r.wind, r.pv);
      out << buf;
    }
  }
}

Standardizer::Standardizer(double mean, double std) : mean_(mean), std_(std) {
  if (!(std > 0.0) || !std::isfinite(mean) || !std::isfinite(std)) {
    throw std::invalid_argument("Standardizer: std must be positive and finite");
  }
}

Standardizer Standardizer::fit(std::span<const double> prices) {
  if (prices.size() < 2) throw std::invalid_argument("Standardizer::fit: need at least 2 values");
  const double m = mean_of(prices);
  const double s = stddev_of(prices);
  if (!(s > 0.0)) throw std::invalid_argument("Standardizer::fit: zero variance");
  return Standardizer(m, s);
}

}  // namespace epf
