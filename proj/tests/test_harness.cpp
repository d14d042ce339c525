#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "epf/harness/backtest.hpp"
#include "epf/harness/report.hpp"
#include "epf/harness/svg.hpp"
#include "epf/harness/synthetic.hpp"
#include "epf/scoring.hpp"

using namespace epf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BacktestConfig mini_config(const std::string& out_dir) {
  BacktestConfig cfg;
  cfg.synthetic.years = 1;
  cfg.synthetic.seed = 20240101;
  cfg.ensemble_train = {Date::from_ymd(2015, 1, 1), Date::from_ymd(2015, 2, 19)};   // 50 days
  cfg.prob_train = {Date::from_ymd(2015, 2, 20), Date::from_ymd(2015, 4, 20)};      // 60 days
  cfg.test = {Date::from_ymd(2015, 4, 21), Date::from_ymd(2015, 4, 30)};            // 10 days
  cfg.rolling.window_days = 45;
  cfg.scenarios_per_day = 40;
  cfg.repeats = 2;
  cfg.base_seed = 99;
  cfg.igep.epochs = 25;
  cfg.emit_scenario_days = 10;  // all test days
  cfg.plot_days = 1;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("synthetic dataset shape and determinism") {
  SyntheticConfig cfg;
  cfg.years = 3;
  cfg.seed = 7;
  const MarketDataset a = generate_synthetic(cfg);
  CHECK(a.num_days() == 3 * 365);
  CHECK(a.records().size() == 3 * 365 * 24);

  const MarketDataset b = generate_synthetic(cfg);
  for (std::size_t i = 0; i < a.records().size(); i += 97) {
    CHECK(a.records()[i].price == b.records()[i].price);
    CHECK(a.records()[i].residual_load == b.records()[i].residual_load);
  }

  SyntheticConfig other = cfg;
  other.seed = 8;
  const MarketDataset c = generate_synthetic(other);
  CHECK(a.records()[100].price != c.records()[100].price);
}

TEST_CASE("zero noise makes prices a pure function of residual load and calendar") {
  SyntheticConfig cfg;
  cfg.years = 1;
  cfg.seed = 123;
  cfg.noise_scale = 0.0;
  const MarketDataset data = generate_synthetic(cfg);
  for (int d = 0; d < data.num_days(); d += 11) {
    for (int h = 0; h < 24; ++h) {
      const double expected =
          synthetic_price_mean(data.residual_load(d, h), data.day(d).weekday(), h, cfg);
      CHECK(data.price(d, h) == expected);
    }
  }
}

TEST_CASE("residual load identity holds in the generator") {
  SyntheticConfig cfg;
  cfg.years = 1;
  cfg.seed = 5;
  const MarketDataset data = generate_synthetic(cfg);
  for (std::size_t i = 0; i < data.records().size(); i += 131) {
    const auto& r = data.records()[i];
    CHECK(r.residual_load == r.load - r.wind - r.pv);
  }
}

TEST_CASE("mean std uses the population convention") {
  CHECK(mean_std({3.0}).second == 0.0);
  const auto [m, s] = mean_std({1.0, 3.0});
  CHECK(m == doctest::Approx(2.0));
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("report csv round trips exactly") {
  ScoreReport report;
  report.methods.push_back({"igep", 16.2941234, 0.008, 2.6931, 0.002, 6.014, 0.0021});
  report.methods.push_back({"raw", 18.591, 0.0, 3.052, 0.0, 5.994, 0.0});
  report.experts.push_back({"arx_m", 3.64, 6.08});
  report.experts.push_back({"avg", 3.29, 5.42});

  const std::string path = "/tmp/epf_report_rt.csv";
  write_report_csv(report, path);
  const ScoreReport back = read_report_csv(path);
  CHECK(back == report);

  // writing again produces identical bytes
  const std::string path2 = "/tmp/epf_report_rt2.csv";
  write_report_csv(back, path2);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("formatted table carries one row per metric and one column per method") {
  ScoreReport report;
  report.methods.push_back({"igep", 16.294, 0.008, 2.693, 0.002, 6.014, 0.002});
  report.methods.push_back({"raw", 18.591, 0.0, 3.052, 0.0, 5.994, 0.0});
  const std::string text = format_report(report);
  CHECK(text.find("metric,igep,raw") != std::string::npos);
  CHECK(text.find("es,16.294 +/- 0.008,18.591 +/- 0.000") != std::string::npos);
  CHECK(text.find("crps,2.693") != std::string::npos);
  CHECK(text.find("rmse,6.014") != std::string::npos);
}

TEST_CASE("fan chart is byte stable and reflects scenario width") {
  Rng rng(9);
  EnsembleForecast f;
  f.day = Date::from_ymd(2017, 3, 5);
  f.values = Eigen::MatrixXd::NullaryExpr(
      24, 5, [&](Eigen::Index, Eigen::Index) { return 30.0 + 2.0 * rng.normal(); });
  f.model_names = expert_names();
  const Eigen::VectorXd actual = f.values.rowwise().mean();

  Eigen::MatrixXd wide(50, 24), narrow(50, 24);
  for (int s = 0; s < 50; ++s) {
    for (int h = 0; h < 24; ++h) {
      const double g = rng.normal();
      wide(s, h) = 30.0 + 8.0 * g;
      narrow(s, h) = 30.0 + 1.0 * g;
    }
  }

  plot_scenarios(wide, f, actual, "/tmp/epf_fan_a.svg");
  plot_scenarios(wide, f, actual, "/tmp/epf_fan_b.svg");
  CHECK(slurp("/tmp/epf_fan_a.svg") == slurp("/tmp/epf_fan_b.svg"));

  // empty scenario set still renders ensemble + actual
  plot_scenarios(Eigen::MatrixXd(0, 24), f, actual, "/tmp/epf_fan_empty.svg");
  CHECK(slurp("/tmp/epf_fan_empty.svg").find("polyline") != std::string::npos);

  const Eigen::VectorXd range_wide = scenario_hourly_range(wide);
  const Eigen::VectorXd range_narrow = scenario_hourly_range(narrow);
  for (int h = 0; h < 24; ++h) CHECK(range_wide[h] > range_narrow[h]);
}

TEST_CASE("config json round trip") {
  BacktestConfig cfg = mini_config("/tmp/epf_cfg_rt");
  cfg.methods = {Method::igep, Method::raw, Method::mge};
  const std::string text = cfg.to_json();
  const BacktestConfig back = BacktestConfig::from_json(text);
  CHECK(back.methods == cfg.methods);
  CHECK(back.scenarios_per_day == cfg.scenarios_per_day);
  CHECK(back.repeats == cfg.repeats);
  CHECK(back.base_seed == cfg.base_seed);
  CHECK(back.test.start == cfg.test.start);
  CHECK(back.igep.epochs == cfg.igep.epochs);
  CHECK(back.rolling.window_days == cfg.rolling.window_days);
}

TEST_CASE("split validation") {
  BacktestConfig cfg = mini_config("/tmp/epf_bad_split");
  cfg.prob_train.start = cfg.ensemble_train.end;  // overlap
  CHECK_THROWS(cfg.validate());
  cfg = mini_config("/tmp/epf_bad_split");
  cfg.repeats = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("mini backtest: determinism, scoring consistency, artifacts") {
  const std::string out_a = "/tmp/epf_run_a";
  const std::string out_b = "/tmp/epf_run_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  BacktestConfig cfg = mini_config(out_a);
  const BacktestResult result = run_backtest(cfg);

  // column set matches the requested methods, in order
  REQUIRE(result.report.methods.size() == cfg.methods.size());
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    CHECK(result.report.methods[i].method == method_name(cfg.methods[i]));
  }

  // raw ensemble is deterministic: zero std across repeats
  for (const auto& m : result.report.methods) {
    if (m.method == "raw") {
      CHECK(m.es_std == 0.0);
      CHECK(m.crps_std == 0.0);
      CHECK(m.rmse_std == 0.0);
    }
  }

  // per-repeat vectors have R entries and every score is finite
  for (const auto& [name, es] : result.es_by_repeat) {
    CHECK(es.size() == 2);
    for (double v : es) CHECK(std::isfinite(v));
  }

  // artifacts exist
  CHECK(fs::exists(fs::path(out_a) / "report.csv"));
  CHECK(fs::exists(fs::path(out_a) / "report.txt"));
  CHECK(fs::exists(fs::path(out_a) / "forecasts.csv"));
  CHECK(fs::exists(fs::path(out_a) / "actuals.csv"));
  CHECK(fs::exists(fs::path(out_a) / "models" / "igep.json"));
  CHECK(fs::exists(fs::path(out_a) / "models" / "copula.json"));
  CHECK(fs::exists(fs::path(out_a) / "plots"));
  int plot_count = 0;
  for (const auto& e : fs::directory_iterator(fs::path(out_a) / "plots")) {
    (void)e;
    ++plot_count;
  }
  CHECK(plot_count == cfg.plot_days);

  // emitted scenario csvs re-score to the harness numbers (repeat 0)
  for (const std::string name : {"igep", "raw", "qra_copula"}) {
    const auto [es, crps] = rescore_run(out_a, name);
    CHECK(es == doctest::Approx(result.es_by_repeat.at(name)[0]).epsilon(1e-9));
    CHECK(crps == doctest::Approx(result.crps_by_repeat.at(name)[0]).epsilon(1e-9));
  }

  // reading a scenario csv back is bit exact
  const fs::path one_csv = fs::path(out_a) / "scenarios" / "igep" / (cfg.test.start.str() + ".csv");
  REQUIRE(fs::exists(one_csv));
  const Eigen::MatrixXd scen = read_scenario_csv(one_csv.string());
  CHECK(scen.rows() == cfg.scenarios_per_day);
  CHECK(scen.cols() == 24);

  // a second identical run produces byte-identical reports
  BacktestConfig cfg_b = mini_config(out_b);
  run_backtest(cfg_b);
  CHECK(slurp(fs::path(out_a) / "report.csv") == slurp(fs::path(out_b) / "report.csv"));
  CHECK(slurp(fs::path(out_a) / "scenarios" / "igep" / (cfg.test.start.str() + ".csv")) ==
        slurp(fs::path(out_b) / "scenarios" / "igep" / (cfg.test.start.str() + ".csv")));
}

TEST_CASE("backtest failures carry the stage tag") {
  BacktestConfig cfg = mini_config("/tmp/epf_run_fail");
  cfg.data_csv = "/nonexistent/file.csv";
  try {
    run_backtest(cfg);
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("[data]") != std::string::npos);
  }
}
