#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "epf/dataset.hpp"
#include "epf/ensemble/experts.hpp"
#include "epf/ensemble/gbdt.hpp"
#include "epf/ensemble/rolling.hpp"
#include "epf/ensemble/wls.hpp"
#include "epf/harness/synthetic.hpp"
#include "epf/rng.hpp"

using namespace epf;

namespace {

// Minimal dataset where load carries the residual-load signal directly.
MarketDataset make_dataset(int days, const std::function<double(int, int)>& rl,
                           const std::function<double(int, int)>& price) {
  std::vector<HourlyRecord> records;
  records.reserve(static_cast<std::size_t>(days) * 24);
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < 24; ++h) {
      HourlyRecord r{};
      r.load = rl(d, h);
      r.wind = 0.0;
      r.pv = 0.0;
      r.residual_load = r.load;
      r.price = price(d, h);
      records.push_back(r);
    }
  }
  return MarketDataset(Date::from_ymd(2015, 1, 1), std::move(records));
}

}  // namespace

TEST_CASE("feature vectors have the documented widths") {
  // 60-day panel with mild structure
  const MarketDataset data = make_dataset(
      60, [](int d, int h) { return 100.0 + d + h; },
      [](int d, int h) { return 20.0 + 0.1 * d + 0.2 * h; });

  CHECK(build_features(data, arx_m_spec(), 10, 5).size() == 8);
  CHECK(arx_m_spec().feature_count() == 8);
  CHECK(build_features(data, arx_u_spec(), 10, 5).size() == 31);
  CHECK(arx_u_spec().feature_count() == 31);
  CHECK(build_features(data, poly_lr_spec(), 10, 5).size() == 27);
  CHECK(poly_lr_spec().feature_count() == 27);

  // lags reach 7 days back
  CHECK_THROWS(build_features(data, arx_m_spec(), 6, 0));
  CHECK_NOTHROW(build_features(data, arx_m_spec(), 7, 0));
  CHECK_NOTHROW(build_features(data, poly_lr_spec(), 0, 0));

  // intercept first, then current residual load, then asinh price lags
  const Eigen::VectorXd f = build_features(data, arx_m_spec(), 10, 3);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == doctest::Approx(113.0));
  CHECK(f[2] == doctest::Approx(asinh_transform(20.0 + 0.9 + 0.6)));

  // hour dummies one-hot
  const Eigen::VectorXd g = build_features(data, arx_u_spec(), 10, 3);
  double dummy_sum = 0.0;
  for (int k = 7; k < 31; ++k) dummy_sum += g[k];
  CHECK(dummy_sum == doctest::Approx(1.0));
  CHECK(g[7 + 3] == 1.0);
}

TEST_CASE("weighted least squares recovers exact linear data") {
  Rng rng(1);
  const int n = 50, p = 4;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd truth(p);
  truth << 2.0, -1.0, 0.5, 3.0;
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (int k = 1; k < p; ++k) X(i, k) = rng.normal();
  }
  const Eigen::VectorXd y = X * truth;
  const Eigen::VectorXd w = fit_ols(X, y);
  CHECK((w - truth).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("unit weights reduce to ols") {
  Rng rng(2);
  const int n = 80, p = 3;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.normal();
    X(i, 2) = rng.uniform(0.0, 10.0);
    y[i] = 3.0 + X(i, 1) - 0.2 * X(i, 2) + 0.3 * rng.normal();
  }
  // normal-equation oracle
  const Eigen::VectorXd oracle = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  const Eigen::VectorXd w = fit_wls(X, y, Eigen::VectorXd::Ones(n));
  CHECK((w - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weights concentrate the fit on one regime") {
  Rng rng(3);
  const int n = 200;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.uniform(-1.0, 1.0);
    const bool first_half = i < n / 2;
    // two different linear regimes
    y[i] = first_half ? 1.0 + 2.0 * X(i, 1) : -4.0 - 3.0 * X(i, 1);
    w[i] = first_half ? 1.0 : 1e-12;
  }
  const Eigen::VectorXd coef = fit_wls(X, y, w);
  CHECK(coef[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(coef[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("duplicate column engages the jitter path") {
  Rng rng(4);
  const int n = 60;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    X(i, 0) = 1.0;
    X(i, 1) = v;
    X(i, 2) = v;
    y[i] = 2.0 * v + rng.normal();
  }
  const Eigen::VectorXd w = fit_ols(X, y);
  CHECK(w.allFinite());
  // the two duplicate columns must jointly carry the slope
  CHECK(w[1] + w[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("gbdt loss is non-increasing and fits a step function") {
  Rng rng(5);
  const int n = 600;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.uniform(0.0, 100.0);
    y[i] = X(i, 0) > 55.0 ? 50.0 : 10.0;
  }
  GbdtModel model;
  GbdtSpec spec;
  model.fit(X, y, Eigen::VectorXd::Ones(n), {false}, spec);

  const auto& losses = model.round_losses();
  REQUIRE(losses.size() == 100);
  for (std::size_t i = 1; i < losses.size(); ++i) {
    CHECK(losses[i] <= losses[i - 1] + 1e-12);
  }

  double sse = 0.0, var = 0.0;
  const double mean = y.mean();
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = X.row(i);
    const double err = model.predict(row) - y[i];
    sse += err * err;
    var += (y[i] - mean) * (y[i] - mean);
  }
  CHECK(std::sqrt(sse / n) < 0.05 * std::sqrt(var / n));
}

TEST_CASE("gbdt respects sample weights") {
  // two clusters at the same x; weights pick the target value
  const int n = 100;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 1);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2 == 0 ? 10.0 : 30.0;
    w[i] = i % 2 == 0 ? 1.0 : 1e-9;
  }
  GbdtModel model;
  model.fit(X, y, w, {false}, {});
  Eigen::RowVectorXd probe = Eigen::RowVectorXd::Zero(1);
  CHECK(model.predict(probe) == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("arx-m recovers its own generating process") {
  // prices generated by the per-hour ARX recursion on the asinh scale
  Rng rng(6);
  const int days = 140;
  const double noise_sd = 0.05;
  std::vector<std::array<double, 24>> rl(days), ytilde(days);
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < 24; ++h) {
      rl[d][h] = 1.0 + 0.3 * std::sin(0.2 * d + 0.26 * h) + 0.1 * rng.normal();
    }
  }
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < 24; ++h) {
      const double lag1 = d >= 1 ? ytilde[d - 1][h] : 0.8;
      const double lag2 = d >= 2 ? ytilde[d - 2][h] : 0.8;
      const double lag7 = d >= 7 ? ytilde[d - 7][h] : 0.8;
      ytilde[d][h] = 0.25 + 0.8 * rl[d][h] + 0.35 * lag1 + 0.15 * lag2 + 0.2 * lag7 -
                     0.1 * (d >= 1 ? rl[d - 1][h] : 1.0) + noise_sd * rng.normal();
    }
  }
  const MarketDataset data = make_dataset(
      days, [&](int d, int h) { return rl[d][h]; },
      [&](int d, int h) { return sinh_inverse(ytilde[d][h]); });

  const int target_first = 100;
  double se = 0.0;
  int count = 0;
  for (int t = target_first; t < days; ++t) {
    const auto expert = fit_linear_expert(data, t - 90, 90, t, arx_m_spec());
    const Eigen::VectorXd pred = expert->predict_day(data, t);
    for (int h = 0; h < 24; ++h) {
      const double err = asinh_transform(pred[h]) - ytilde[t][h];
      se += err * err;
      ++count;
    }
  }
  // out-of-sample error on the transformed scale approaches the noise floor
  CHECK(std::sqrt(se / count) < 2.0 * noise_sd);
}

TEST_CASE("locally weighted regression beats a global line on curved data") {
  Rng rng(7);
  const int days = 80;
  const MarketDataset data = make_dataset(
      days,
      [&](int d, int h) {
        return 50.0 * std::sin(0.37 * (d * 24 + h)) + 60.0;  // wide RL range
      },
      [&](int d, int h) {
        const double rl = 50.0 * std::sin(0.37 * (d * 24 + h)) + 60.0;
        const double z = (rl - 60.0) / 25.0;
        return 30.0 + 10.0 * z * z * z;  // strongly curved in RL
      });

  LinearExpertSpec line;
  line.name = "line";
  line.intercept = true;
  const int t = days - 1;
  const auto global = fit_linear_expert(data, t - 60, 60, t, line);
  const auto local = fit_lw_lr_expert(data, t - 60, 60);

  double se_global = 0.0, se_local = 0.0;
  const int idx = t;
  for (int h = 0; h < 24; ++h) {
    const double actual = data.price(idx, h);
    se_global += std::pow(global->predict_day(data, idx)[h] - actual, 2);
    se_local += std::pow(local->predict_day(data, idx)[h] - actual, 2);
  }
  CHECK(se_local < se_global);
}

TEST_CASE("asinh pipeline equals the identity pipeline on pre-transformed prices") {
  // dataset B holds asinh(prices) of dataset A; fitting the asinh expert on A
  // must reproduce sinh of the plain expert fitted on B, bit for bit.
  Rng rng(8);
  const int days = 70;
  std::vector<std::array<double, 24>> price(days);
  std::vector<std::array<double, 24>> rl(days);
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < 24; ++h) {
      rl[d][h] = 40.0 + 10.0 * rng.normal();
      price[d][h] = 25.0 + 0.5 * rl[d][h] + 3.0 * rng.normal();
    }
  }
  const MarketDataset a = make_dataset(
      days, [&](int d, int h) { return rl[d][h]; }, [&](int d, int h) { return price[d][h]; });
  const MarketDataset b = make_dataset(
      days, [&](int d, int h) { return rl[d][h]; },
      [&](int d, int h) { return asinh_transform(price[d][h]); });

  LinearExpertSpec plain = arx_m_spec();
  plain.transform = TargetTransform::none;

  const int t = days - 1;
  const auto on_a = fit_linear_expert(a, t - 50, 50, t, arx_m_spec());
  const auto on_b = fit_linear_expert(b, t - 50, 50, t, plain);
  const Eigen::VectorXd pred_a = on_a->predict_day(a, t);
  const Eigen::VectorXd pred_b = on_b->predict_day(b, t);
  for (int h = 0; h < 24; ++h) {
    CHECK(pred_a[h] == sinh_inverse(pred_b[h]));
  }
}

TEST_CASE("rolling forecast shapes, avg, and csv round trip") {
  SyntheticConfig cfg;
  cfg.years = 1;
  cfg.seed = 100;
  const MarketDataset data = generate_synthetic(cfg);

  RollingConfig rolling;
  rolling.window_days = 60;
  const Date start = cfg.start + 70;
  const Date end = start + 4;
  const auto forecasts = rolling_forecast(data, start, end, rolling);
  REQUIRE(forecasts.size() == 5);
  for (const auto& f : forecasts) {
    CHECK(f.values.rows() == 24);
    CHECK(f.values.cols() == 5);
    CHECK(f.model_names == expert_names());
    CHECK(f.values.allFinite());
  }
  CHECK(forecasts.front().day == start);
  CHECK(forecasts.back().day == end);

  // avg column is the row mean
  const ExpertMetrics metrics = expert_metrics(forecasts, data);
  REQUIRE(metrics.names.size() == 6);
  CHECK(metrics.names.back() == "avg");
  for (double v : metrics.mae) CHECK(std::isfinite(v));

  const std::string path = "/tmp/epf_forecasts_test.csv";
  write_forecasts_csv(forecasts, data, path);
  const auto back = read_forecasts_csv(path);
  REQUIRE(back.size() == forecasts.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].day == forecasts[i].day);
    CHECK((back[i].values - forecasts[i].values).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("no look-ahead: future prices cannot move today's forecast") {
  SyntheticConfig cfg;
  cfg.years = 1;
  cfg.seed = 200;
  const MarketDataset data = generate_synthetic(cfg);
  const int t = 120;

  // clone with all prices from day t onward perturbed
  std::vector<HourlyRecord> records = data.records();
  for (std::size_t i = static_cast<std::size_t>(t) * 24; i < records.size(); ++i) {
    records[i].price = records[i].price * 1.7 + 13.0;
  }
  const MarketDataset tampered(data.first_day(), std::move(records));

  RollingConfig rolling;
  rolling.window_days = 60;
  const Date day = data.day(t);
  const auto original = rolling_forecast(data, day, day, rolling);
  const auto shifted = rolling_forecast(tampered, day, day, rolling);
  REQUIRE(original.size() == 1);
  REQUIRE(shifted.size() == 1);
  CHECK((original[0].values - shifted[0].values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("refit cadence reuses the fitted experts between refits") {
  SyntheticConfig cfg;
  cfg.years = 1;
  cfg.seed = 300;
  const MarketDataset data = generate_synthetic(cfg);

  RollingConfig daily;
  daily.window_days = 45;
  RollingConfig sparse = daily;
  sparse.refit_every = 3;

  const Date start = cfg.start + 60;
  const auto a = rolling_forecast(data, start, start + 5, daily);
  const auto b = rolling_forecast(data, start, start + 5, sparse);
  REQUIRE(a.size() == b.size());
  // first day identical (same fit); between refits the stale window shows
  CHECK((a[0].values - b[0].values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a[1].values - b[1].values).cwiseAbs().maxCoeff() > 0.0);
  // day 3 is a refit boundary again: windows coincide
  CHECK((a[3].values - b[3].values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("window validation") {
  SyntheticConfig cfg;
  cfg.years = 1;
  cfg.seed = 400;
  const MarketDataset data = generate_synthetic(cfg);
  RollingConfig rolling;
  rolling.window_days = 365;
  // no full window before the target
  CHECK_THROWS(rolling_forecast(data, cfg.start + 100, cfg.start + 101, rolling));
}
