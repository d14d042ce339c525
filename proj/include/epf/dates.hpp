#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace epf {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
 public:
  Date() = default;
  static Date from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > 31) {
      throw std::invalid_argument("Date: invalid year-month-day");
    }
    return Date(days_from_civil(year, month, day));
  }
  static Date from_serial(std::int64_t days) { return Date(days); }

  // "YYYY-MM-DD"
  static Date parse(const std::string& s) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3) {
      throw std::invalid_argument("Date: cannot parse '" + s + "'");
    }
    return from_ymd(y, m, d);
  }

  std::int64_t serial() const { return serial_; }

  struct Ymd {
    int year, month, day;
  };
  Ymd ymd() const { return civil_from_days(serial_); }

  // 0 = Sunday ... 6 = Saturday.
  int weekday() const {
    return static_cast<int>(((serial_ % 7) + 11) % 7);
  }
  bool is_weekend() const {
    const int wd = weekday();
    return wd == 0 || wd == 6;
  }

  std::string str() const {
    const Ymd c = ymd();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
  }

  Date operator+(std::int64_t days) const { return Date(serial_ + days); }
  Date operator-(std::int64_t days) const { return Date(serial_ - days); }
  std::int64_t operator-(Date other) const { return serial_ - other.serial_; }
  Date& operator++() {
    ++serial_;
    return *this;
  }
  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::int64_t serial) : serial_(serial) {}

  static std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
        static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
  }

  static Ymd civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m),
            static_cast<int>(d)};
  }

  std::int64_t serial_ = 0;
};

}  // namespace epf
