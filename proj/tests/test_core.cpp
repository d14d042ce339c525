#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "epf/dataset.hpp"
#include "epf/dates.hpp"
#include "epf/rng.hpp"

using namespace epf;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// days complete 24-hour days starting 2015-01-01; optionally drop one hour.
std::string write_synthetic_csv(const std::string& name, int days, int drop_hour_of_day = -1) {
  const std::string path = temp_path(name);
  std::ofstream out(path);
  out << "timestamp,price,load_forecast,wind_forecast,solar_forecast\n";
  for (int d = 0; d < days; ++d) {
    const Date date = Date::from_ymd(2015, 1, 1) + d;
    for (int h = 0; h < 24; ++h) {
      if (d == days - 1 && h == drop_hour_of_day) continue;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%sT%02d:00:00,%g,%g,%g,%g\n", date.str().c_str(), h,
                    30.0 + d + 0.1 * h, 100.0 + h, 20.0, 30.0);
      out << buf;
    }
  }
  return path;
}

}  // namespace

TEST_CASE("dates round trip and order") {
  const Date d = Date::from_ymd(2016, 2, 29);
  CHECK(d.str() == "2016-02-29");
  CHECK(Date::parse("2016-02-29") == d);
  CHECK((d + 1).str() == "2016-03-01");
  CHECK(Date::from_ymd(2017, 1, 1) - Date::from_ymd(2016, 1, 1) == 366);
  CHECK(Date::from_ymd(2015, 1, 1).weekday() == 4);  // Thursday
  CHECK(Date::from_ymd(2015, 1, 3).is_weekend());
}

TEST_CASE("csv ingestion builds a complete panel") {
  const std::string path = write_synthetic_csv("epf_ok.csv", 3);
  const MarketDataset data = ingest_csv(path);
  CHECK(data.num_days() == 3);
  CHECK(data.records().size() == 72);
  CHECK(data.first_day() == Date::from_ymd(2015, 1, 1));
  // residual load is derived: 100+h - 20 - 30
  CHECK(data.at(0, 0).residual_load == doctest::Approx(50.0));
  CHECK(data.at(2, 5).residual_load == doctest::Approx(55.0));
  for (int d = 0; d < 3; ++d) {
    for (int h = 0; h < 24; ++h) {
      const auto& r = data.at(d, h);
      CHECK(r.residual_load == r.load - r.wind - r.pv);
    }
  }
}

TEST_CASE("csv ingestion is deterministic") {
  const std::string path = write_synthetic_csv("epf_det.csv", 2);
  const MarketDataset a = ingest_csv(path);
  const MarketDataset b = ingest_csv(path);
  REQUIRE(a.records().size() == b.records().size());
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    CHECK(a.records()[i].price == b.records()[i].price);
    CHECK(a.records()[i].residual_load == b.records()[i].residual_load);
  }
}

TEST_CASE("incomplete day is rejected with its date") {
  const std::string path = write_synthetic_csv("epf_gap.csv", 2, 23);
  try {
    ingest_csv(path);
    FAIL("expected a structural error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("2015-01-02") != std::string::npos);
  }
}

TEST_CASE("forward fill policy accepts a gap") {
  const std::string path = write_synthetic_csv("epf_ff.csv", 2, 23);
  CsvSchema schema;
  schema.missing = MissingPolicy::forward_fill;
  const MarketDataset data = ingest_csv(path, schema);
  CHECK(data.num_days() == 2);
  CHECK(data.at(1, 23).price == data.at(1, 22).price);
}

TEST_CASE("malformed number carries the line number") {
  const std::string path = temp_path("epf_bad.csv");
  {
    std::ofstream out(path);
    out << "timestamp,price,load_forecast,wind_forecast,solar_forecast\n";
    out << "2015-01-01T00:00:00,not_a_number,1,2,3\n";
  }
  try {
    ingest_csv(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("dataset csv round trip") {
  const std::string path = write_synthetic_csv("epf_rt.csv", 2);
  const MarketDataset a = ingest_csv(path);
  const std::string path2 = temp_path("epf_rt2.csv");
  write_csv(a, path2);
  const MarketDataset b = ingest_csv(path2);
  REQUIRE(a.records().size() == b.records().size());
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    CHECK(a.records()[i].price == b.records()[i].price);
    CHECK(a.records()[i].load == b.records()[i].load);
  }
}

TEST_CASE("standardizer moments, population convention") {
  const std::vector<double> two = {0.0, 2.0};
  const Standardizer s1 = Standardizer::fit(two);
  CHECK(s1.mean() == doctest::Approx(1.0));
  CHECK(s1.std() == doctest::Approx(1.0));

  const std::vector<double> four = {1.0, 2.0, 3.0, 4.0};
  const Standardizer s2 = Standardizer::fit(four);
  CHECK(s2.mean() == doctest::Approx(2.5));
  CHECK(s2.std() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));

  CHECK_THROWS(Standardizer::fit(std::vector<double>{3.0, 3.0, 3.0}));
  CHECK_THROWS(Standardizer::fit(std::vector<double>{3.0}));
}

TEST_CASE("standardizer round trip") {
  Rng rng(11);
  std::vector<double> prices(200);
  for (auto& p : prices) p = 35.0 + 12.0 * rng.normal();
  const Standardizer st = Standardizer::fit(prices);
  for (int i = 0; i < 100; ++i) {
    const double v = 200.0 * (rng.uniform() - 0.5);
    CHECK(st.invert(st.apply(v)) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("asinh transform") {
  CHECK(asinh_transform(0.0) == 0.0);
  CHECK(asinh_transform(1.0) == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK(sinh_inverse(asinh_transform(-37.5)) == doctest::Approx(-37.5).epsilon(1e-10));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double y = 500.0 * rng.normal();
    CHECK(sinh_inverse(asinh_transform(y)) == doctest::Approx(y).epsilon(1e-10));
  }
}
