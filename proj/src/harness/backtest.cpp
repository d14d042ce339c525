#include "epf/harness/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "epf/baselines/copula.hpp"
#include "epf/baselines/marginal.hpp"
#include "epf/baselines/mge.hpp"
#include "epf/baselines/ngr.hpp"
#include "epf/baselines/qra.hpp"
#include "epf/harness/svg.hpp"
#include "epf/scoring.hpp"

namespace epf {

namespace fs = std::filesystem;
using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::igep: return "igep";
    case Method::raw: return "raw";
    case Method::mge: return "mge";
    case Method::igep_ind: return "igep_ind";
    case Method::qra_copula: return "qra_copula";
    case Method::ngr_ml_copula: return "ngr_ml_copula";
    case Method::ngr_crps_copula: return "ngr_crps_copula";
  }
  throw std::invalid_argument("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("method_from_name: unknown method '" + name + "'");
}

std::vector<Method> all_methods() {
  return {Method::igep,       Method::raw,           Method::mge,
          Method::igep_ind,   Method::qra_copula,    Method::ngr_ml_copula,
          Method::ngr_crps_copula};
}

void BacktestConfig::validate() const {
  if (!(ensemble_train.start <= ensemble_train.end && prob_train.start <= prob_train.end &&
        test.start <= test.end)) {
    throw std::invalid_argument("BacktestConfig: each split must have start <= end");
  }
  if (!(ensemble_train.end < prob_train.start && prob_train.end < test.start)) {
    throw std::invalid_argument("BacktestConfig: splits must be disjoint and ordered");
  }
  if (repeats < 1) throw std::invalid_argument("BacktestConfig: repeats must be >= 1");
  if (scenarios_per_day < 2) {
    throw std::invalid_argument("BacktestConfig: scenarios_per_day must be >= 2");
  }
  if (methods.empty()) throw std::invalid_argument("BacktestConfig: no methods requested");
  if (emit_scenario_days < 0 || plot_days < 0) {
    throw std::invalid_argument("BacktestConfig: artifact day counts must be >= 0");
  }
}

namespace {

json range_to_json(const DateRange& r) {
  return json{{"start", r.start.str()}, {"end", r.end.str()}};
}

DateRange range_from_json(const json& j) {
  return {Date::parse(j.at("start").get<std::string>()),
          Date::parse(j.at("end").get<std::string>())};
}

}  // namespace

std::string BacktestConfig::to_json() const {
  json j;
  j["data_csv"] = data_csv;
  j["synthetic"] = {{"years", synthetic.years},
                    {"start", synthetic.start.str()},
                    {"seed", synthetic.seed},
                    {"noise_scale", synthetic.noise_scale}};
  j["splits"] = {{"ensemble_train", range_to_json(ensemble_train)},
                 {"prob_train", range_to_json(prob_train)},
                 {"test", range_to_json(test)}};
  j["methods"] = json::array();
  for (Method m : methods) j["methods"].push_back(method_name(m));
  j["scenarios_per_day"] = scenarios_per_day;
  j["repeats"] = repeats;
  j["base_seed"] = base_seed;
  j["out_dir"] = out_dir;
  j["rolling"] = {{"window_days", rolling.window_days},
                  {"refit_every", rolling.refit_every},
                  {"gb_positive_kernel", rolling.gb_positive_kernel}};
  j["igep"] = {{"batch_size", igep.batch_size},
               {"scenarios_per_example", igep.scenarios_per_example},
               {"lambda", igep.lambda},
               {"epochs", igep.epochs},
               {"j_latent", igep.j_latent},
               {"adam_eta", igep.adam_eta},
               {"adam_beta1", igep.adam_beta1},
               {"adam_beta2", igep.adam_beta2},
               {"adam_epsilon", igep.adam_epsilon}};
  j["igep_ind_delta"] = igep_ind_delta;
  j["emit_scenario_days"] = emit_scenario_days;
  j["plot_days"] = plot_days;
  return j.dump(2);
}

BacktestConfig BacktestConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  BacktestConfig cfg;
  if (j.contains("data_csv")) cfg.data_csv = j.at("data_csv").get<std::string>();
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    if (s.contains("years")) cfg.synthetic.years = s.at("years").get<int>();
    if (s.contains("start")) cfg.synthetic.start = Date::parse(s.at("start").get<std::string>());
    if (s.contains("seed")) cfg.synthetic.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("noise_scale")) cfg.synthetic.noise_scale = s.at("noise_scale").get<double>();
  }
  if (j.contains("splits")) {
    const json& s = j.at("splits");
    cfg.ensemble_train = range_from_json(s.at("ensemble_train"));
    cfg.prob_train = range_from_json(s.at("prob_train"));
    cfg.test = range_from_json(s.at("test"));
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& name : j.at("methods")) {
      cfg.methods.push_back(method_from_name(name.get<std::string>()));
    }
  }
  if (j.contains("scenarios_per_day")) cfg.scenarios_per_day = j.at("scenarios_per_day").get<int>();
  if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<int>();
  if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("rolling")) {
    const json& r = j.at("rolling");
    if (r.contains("window_days")) cfg.rolling.window_days = r.at("window_days").get<int>();
    if (r.contains("refit_every")) cfg.rolling.refit_every = r.at("refit_every").get<int>();
    if (r.contains("gb_positive_kernel")) {
      cfg.rolling.gb_positive_kernel = r.at("gb_positive_kernel").get<bool>();
    }
  }
  if (j.contains("igep")) {
    const json& g = j.at("igep");
    if (g.contains("batch_size")) cfg.igep.batch_size = g.at("batch_size").get<int>();
    if (g.contains("scenarios_per_example")) {
      cfg.igep.scenarios_per_example = g.at("scenarios_per_example").get<int>();
    }
    if (g.contains("lambda")) cfg.igep.lambda = g.at("lambda").get<double>();
    if (g.contains("epochs")) cfg.igep.epochs = g.at("epochs").get<int>();
    if (g.contains("j_latent")) cfg.igep.j_latent = g.at("j_latent").get<int>();
    if (g.contains("adam_eta")) cfg.igep.adam_eta = g.at("adam_eta").get<double>();
    if (g.contains("adam_beta1")) cfg.igep.adam_beta1 = g.at("adam_beta1").get<double>();
    if (g.contains("adam_beta2")) cfg.igep.adam_beta2 = g.at("adam_beta2").get<double>();
    if (g.contains("adam_epsilon")) cfg.igep.adam_epsilon = g.at("adam_epsilon").get<double>();
  }
  if (j.contains("igep_ind_delta")) cfg.igep_ind_delta = j.at("igep_ind_delta").get<double>();
  if (j.contains("emit_scenario_days")) {
    cfg.emit_scenario_days = j.at("emit_scenario_days").get<int>();
  }
  if (j.contains("plot_days")) cfg.plot_days = j.at("plot_days").get<int>();
  return cfg;
}

BacktestConfig BacktestConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("BacktestConfig: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void write_scenario_csv(const Eigen::MatrixXd& scenarios, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scenario_csv: cannot open " + path);
  out << "scenario";
  for (int h = 1; h <= 24; ++h) out << ",h" << h;
  out << "\n";
  char buf[40];
  for (Eigen::Index s = 0; s < scenarios.rows(); ++s) {
    out << s;
    for (Eigen::Index h = 0; h < scenarios.cols(); ++h) {
      std::snprintf(buf, sizeof(buf), ",%.17g", scenarios(s, h));
      out << buf;
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_scenario_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_scenario_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_scenario_csv: empty " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> row;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
      if (first) {
        first = false;
        continue;
      }
      row.push_back(std::stod(tok));
    }
    if (row.size() != 24) throw std::runtime_error("read_scenario_csv: bad row in " + path);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 24);
  for (Eigen::Index s = 0; s < out.rows(); ++s) {
    for (int h = 0; h < 24; ++h) out(s, h) = rows[static_cast<std::size_t>(s)][h];
  }
  return out;
}

void write_actuals_csv(const MarketDataset& data, const DateRange& range,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_actuals_csv: cannot open " + path);
  out << "date,hour,price\n";
  char buf[40];
  for (Date d = range.start; d <= range.end; ++d) {
    const int idx = data.index_of(d);
    if (idx < 0) throw std::runtime_error("write_actuals_csv: day outside dataset " + d.str());
    for (int h = 0; h < 24; ++h) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%.17g\n", d.str().c_str(), h + 1,
                    data.price(idx, h));
      out << buf;
    }
  }
}

std::map<std::string, Eigen::VectorXd> read_actuals_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_actuals_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::map<std::string, Eigen::VectorXd> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string date, hour, price;
    std::getline(ss, date, ',');
    std::getline(ss, hour, ',');
    std::getline(ss, price, ',');
    auto [it, inserted] = out.try_emplace(date, Eigen::VectorXd::Zero(24));
    it->second[std::stoi(hour) - 1] = std::stod(price);
  }
  return out;
}

namespace {

struct DayScore {
  double es = 0.0;
  double crps = 0.0;
  Eigen::VectorXd mean;  // predictive mean, 24
};

DayScore score_scenarios(const Eigen::MatrixXd& scenarios, const Eigen::VectorXd& actual) {
  DayScore score;
  score.es = energy_score(scenarios, actual);
  double crps_sum = 0.0;
  std::vector<double> column(static_cast<std::size_t>(scenarios.rows()));
  for (int h = 0; h < 24; ++h) {
    for (Eigen::Index s = 0; s < scenarios.rows(); ++s) {
      column[static_cast<std::size_t>(s)] = scenarios(s, h);
    }
    crps_sum += crps_sample(column, actual[h]);
  }
  score.crps = crps_sum / 24.0;
  score.mean = scenarios.colwise().mean();
  return score;
}

// Everything the per-day scenario generators need, fitted once per
// (method, repeat) — or once overall for the deterministic fits.
struct FittedMethod {
  Method method;
  IgepModel igep;                      // igep / igep_ind
  MgeModel mge;                        // mge
  QraModel qra;                        // qra_copula
  NgrModel ngr;                        // ngr_*_copula
  CopulaModel copula;                  // shared by copula methods
};

std::string stage(const std::string& name) { return "[" + name + "] "; }

}  // namespace

BacktestResult run_backtest(const BacktestConfig& cfg) {
  cfg.validate();

  // ---- data ----------------------------------------------------------
  MarketDataset data = [&] {
    try {
      return cfg.data_csv.empty() ? generate_synthetic(cfg.synthetic)
                                  : ingest_csv(cfg.data_csv);
    } catch (const std::exception& e) {
      throw std::runtime_error(stage("data") + e.what());
    }
  }();

  for (const DateRange* r : {&cfg.ensemble_train, &cfg.prob_train, &cfg.test}) {
    if (data.index_of(r->start) < 0 || data.index_of(r->end) < 0) {
      throw std::runtime_error(stage("splits") + "split day outside dataset: " +
                               r->start.str() + " .. " + r->end.str());
    }
  }

  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir / "scenarios");
  fs::create_directories(out_dir / "plots");
  fs::create_directories(out_dir / "models");

  // ---- ensemble ------------------------------------------------------
  std::vector<EnsembleForecast> forecasts;
  try {
    forecasts = rolling_forecast(data, cfg.prob_train.start, cfg.test.end, cfg.rolling);
    write_forecasts_csv(forecasts, data, (out_dir / "forecasts.csv").string());
    write_actuals_csv(data, cfg.test, (out_dir / "actuals.csv").string());
  } catch (const std::exception& e) {
    throw std::runtime_error(stage("ensemble") + e.what());
  }

  auto forecast_at = [&](Date day) -> const EnsembleForecast& {
    const std::int64_t off = day - cfg.prob_train.start;
    if (off < 0 || off >= static_cast<std::int64_t>(forecasts.size()) ||
        forecasts[static_cast<std::size_t>(off)].day != day) {
      throw std::runtime_error(stage("ensemble") + "missing forecast for " + day.str());
    }
    return forecasts[static_cast<std::size_t>(off)];
  };

  // ---- standardizer + training inputs ---------------------------------
  const int prob_first = data.index_of(cfg.prob_train.start);
  const Standardizer standardizer = [&] {
    try {
      const std::vector<double> prices = data.prices(prob_first, cfg.prob_train.days());
      return Standardizer::fit(prices);
    } catch (const std::exception& e) {
      throw std::runtime_error(stage("standardizer") + e.what());
    }
  }();

  const int num_train = cfg.prob_train.days();
  std::vector<TrainingPair> train_std(static_cast<std::size_t>(num_train));
  std::vector<Eigen::MatrixXd> train_x_raw(static_cast<std::size_t>(num_train));
  std::vector<Eigen::VectorXd> train_y_raw(static_cast<std::size_t>(num_train));
  Eigen::MatrixXd train_residuals(num_train, 24);  // y - xbar, EUR/MWh
  for (int i = 0; i < num_train; ++i) {
    const Date day = cfg.prob_train.start + i;
    const EnsembleForecast& f = forecast_at(day);
    const int idx = data.index_of(day);
    Eigen::VectorXd y(24);
    for (int h = 0; h < 24; ++h) y[h] = data.price(idx, h);
    train_x_raw[static_cast<std::size_t>(i)] = f.values;
    train_y_raw[static_cast<std::size_t>(i)] = y;
    train_residuals.row(i) = (y - f.member_mean()).transpose();
    TrainingPair& p = train_std[static_cast<std::size_t>(i)];
    p.x = f.values.unaryExpr([&](double v) { return standardizer.apply(v); });
    p.y = y.unaryExpr([&](double v) { return standardizer.apply(v); });
  }

  const int num_test = cfg.test.days();
  std::vector<Eigen::VectorXd> test_actual(static_cast<std::size_t>(num_test));
  for (int i = 0; i < num_test; ++i) {
    const int idx = data.index_of(cfg.test.start + i);
    Eigen::VectorXd y(24);
    for (int h = 0; h < 24; ++h) y[h] = data.price(idx, h);
    test_actual[static_cast<std::size_t>(i)] = y;
  }

  // Deterministic fits shared by every repeat.
  CopulaModel copula;
  MgeModel mge;
  QraModel qra;
  NgrModel ngr_ml, ngr_crps;
  const auto needs = [&](Method m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
  };
  try {
    if (needs(Method::qra_copula) || needs(Method::ngr_ml_copula) ||
        needs(Method::ngr_crps_copula)) {
      copula = fit_gaussian_copula(train_residuals);
    }
    if (needs(Method::mge)) mge = fit_mge(train_residuals);
    if (needs(Method::qra_copula)) {
      std::vector<Eigen::MatrixXd> x_std(train_std.size());
      std::vector<Eigen::VectorXd> y_std(train_std.size());
      for (std::size_t i = 0; i < train_std.size(); ++i) {
        x_std[i] = train_std[i].x;
        y_std[i] = train_std[i].y;
      }
      qra = fit_qra(x_std, y_std, dense_tau_grid());
    }
    if (needs(Method::ngr_ml_copula) || needs(Method::ngr_crps_copula)) {
      std::vector<NgrHourData> hours(24);
      for (int h = 0; h < 24; ++h) {
        NgrHourData& hd = hours[static_cast<std::size_t>(h)];
        hd.xbar.resize(num_train);
        hd.spread.resize(num_train);
        hd.y.resize(num_train);
        for (int i = 0; i < num_train; ++i) {
          const Eigen::MatrixXd& x = train_std[static_cast<std::size_t>(i)].x;
          const double mean = x.row(h).mean();
          hd.xbar[i] = mean;
          hd.spread[i] =
              std::sqrt((x.row(h).array() - mean).square().sum() / x.cols());
          hd.y[i] = train_std[static_cast<std::size_t>(i)].y[h];
        }
      }
      if (needs(Method::ngr_ml_copula)) ngr_ml = fit_ngr(hours, NgrEstimation::ml);
      if (needs(Method::ngr_crps_copula)) ngr_crps = fit_ngr(hours, NgrEstimation::crps);
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(stage("fit") + e.what());
  }

  // ---- per method x repeat -------------------------------------------
  BacktestResult result;
  std::map<Method, IgepModel> rep0_igep;  // kept for the model artifacts
  for (Method method : cfg.methods) {
    const std::string name = method_name(method);
    auto& es_reps = result.es_by_repeat[name];
    auto& crps_reps = result.crps_by_repeat[name];
    auto& rmse_reps = result.rmse_by_repeat[name];
    if (cfg.emit_scenario_days > 0) fs::create_directories(out_dir / "scenarios" / name);

    for (int rep = 0; rep < cfg.repeats; ++rep) {
      const auto method_id = static_cast<std::uint64_t>(method);

      // training (only the IGEP variants are stochastic)
      IgepModel igep_model;
      if (method == Method::igep || method == Method::igep_ind) {
        try {
          TrainConfig tc = cfg.igep;
          tc.seed = derive_seed(cfg.base_seed, method_id, static_cast<std::uint64_t>(rep), 0);
          if (method == Method::igep_ind) tc.fixed_delta = cfg.igep_ind_delta;
          igep_model.params = train(train_std, tc).params;
          igep_model.standardizer = standardizer;
          igep_model.config = tc;
          if (rep == 0) rep0_igep[method] = igep_model;
        } catch (const std::exception& e) {
          throw std::runtime_error(stage("train " + name) + e.what());
        }
      }

      // prediction + scoring, parallel over days with per-day streams
      std::vector<DayScore> day_scores(static_cast<std::size_t>(num_test));
      std::string day_error;
#pragma omp parallel for schedule(dynamic)
      for (int i = 0; i < num_test; ++i) {
        try {
          const Date day = cfg.test.start + i;
          const EnsembleForecast& f = forecast_at(day);
          Rng rng(derive_seed(cfg.base_seed, method_id, static_cast<std::uint64_t>(rep),
                              1000 + static_cast<std::uint64_t>(i)));
          Eigen::MatrixXd scenarios;
          switch (method) {
            case Method::raw:
              scenarios = f.values.transpose();
              break;
            case Method::mge:
              scenarios = sample_mge(mge, f.member_mean(), cfg.scenarios_per_day, rng);
              break;
            case Method::igep:
              scenarios = predict_scenarios(igep_model.params, f, cfg.scenarios_per_day,
                                            standardizer, rng)
                              .scenarios;
              break;
            case Method::igep_ind:
              scenarios = predict_scenarios(igep_model.params, f, cfg.scenarios_per_day,
                                            standardizer, rng, cfg.igep_ind_delta)
                              .scenarios;
              break;
            case Method::qra_copula: {
              std::vector<MarginalForecast> marginals;
              marginals.reserve(24);
              for (int h = 0; h < 24; ++h) {
                const Eigen::VectorXd members =
                    f.values.row(h).unaryExpr([&](double v) { return standardizer.apply(v); });
                const MarginalForecast std_m = qra.predict_marginal(h, members);
                std::vector<double> raw(std_m.values().size());
                for (std::size_t k = 0; k < raw.size(); ++k) {
                  raw[k] = standardizer.invert(std_m.values()[k]);
                }
                marginals.push_back(quantiles_to_marginal(std_m.taus(), raw));
              }
              scenarios = copula_sample(marginals, copula, cfg.scenarios_per_day, rng);
              break;
            }
            case Method::ngr_ml_copula:
            case Method::ngr_crps_copula: {
              const NgrModel& model = method == Method::ngr_ml_copula ? ngr_ml : ngr_crps;
              std::vector<MarginalForecast> marginals;
              marginals.reserve(24);
              for (int h = 0; h < 24; ++h) {
                const Eigen::VectorXd row = f.values.row(h);
                const double mean_std = standardizer.apply(row.mean());
                const double spread_std =
                    std::sqrt((row.array() - row.mean()).square().sum() / row.size()) /
                    standardizer.std();
                const double mu = standardizer.invert(model.predict_mu(h, mean_std));
                const double sigma = model.predict_sigma(h, spread_std) * standardizer.std();
                marginals.push_back(MarginalForecast::gaussian(mu, sigma));
              }
              scenarios = copula_sample(marginals, copula, cfg.scenarios_per_day, rng);
              break;
            }
          }
          day_scores[static_cast<std::size_t>(i)] =
              score_scenarios(scenarios, test_actual[static_cast<std::size_t>(i)]);

          if (rep == 0 && i < cfg.emit_scenario_days) {
            write_scenario_csv(scenarios,
                               (out_dir / "scenarios" / name / (day.str() + ".csv")).string());
          }
          if (rep == 0 && method == cfg.methods.front() && i < cfg.plot_days) {
            plot_scenarios(scenarios, f, test_actual[static_cast<std::size_t>(i)],
                           (out_dir / "plots" / (day.str() + ".svg")).string());
          }
        } catch (const std::exception& e) {
          // exceptions must not unwind across the parallel region
#pragma omp critical
          if (day_error.empty()) day_error = e.what();
        }
      }
      if (!day_error.empty()) {
        throw std::runtime_error(stage("predict " + name) + day_error);
      }

      double es_sum = 0.0, crps_sum = 0.0, se_sum = 0.0;
      for (int i = 0; i < num_test; ++i) {
        const DayScore& s = day_scores[static_cast<std::size_t>(i)];
        es_sum += s.es;
        crps_sum += s.crps;
        se_sum += (s.mean - test_actual[static_cast<std::size_t>(i)]).squaredNorm();
      }
      es_reps.push_back(es_sum / num_test);
      crps_reps.push_back(crps_sum / num_test);
      rmse_reps.push_back(std::sqrt(se_sum / (num_test * 24.0)));
    }

    MethodScores scores;
    scores.method = name;
    std::tie(scores.es_mean, scores.es_std) = mean_std(es_reps);
    std::tie(scores.crps_mean, scores.crps_std) = mean_std(crps_reps);
    std::tie(scores.rmse_mean, scores.rmse_std) = mean_std(rmse_reps);
    result.report.methods.push_back(scores);
  }

  // ---- expert metrics + artifacts --------------------------------------
  try {
    const ExpertMetrics em = expert_metrics(forecasts, data);
    for (std::size_t e = 0; e < em.names.size(); ++e) {
      result.report.experts.push_back({em.names[e], em.mae[e], em.rmse[e]});
    }
    write_report_csv(result.report, (out_dir / "report.csv").string());
    std::ofstream txt(out_dir / "report.txt");
    txt << format_report(result.report);
    std::ofstream cfg_out(out_dir / "config.json");
    cfg_out << cfg.to_json() << "\n";
  } catch (const std::exception& e) {
    throw std::runtime_error(stage("report") + e.what());
  }

  // models for repeat 0 of each requested method
  try {
    for (Method method : cfg.methods) {
      const std::string name = method_name(method);
      const fs::path path = out_dir / "models" / (name + ".json");
      if (method == Method::igep || method == Method::igep_ind) {
        std::ofstream out(path);
        out << rep0_igep.at(method).to_json() << "\n";
      } else if (method == Method::mge) {
        json j;
        j["kind"] = "mge";
        j["covariance"] = std::vector<std::vector<double>>();
        for (int r = 0; r < mge.dims(); ++r) {
          j["covariance"].push_back(
              std::vector<double>(mge.covariance.row(r).begin(), mge.covariance.row(r).end()));
        }
        std::ofstream out(path);
        out << j.dump(2) << "\n";
      } else if (method == Method::qra_copula) {
        json j;
        j["kind"] = "qra";
        j["taus"] = qra.taus;
        j["coeffs_by_hour"] = json::array();
        for (const auto& c : qra.coeffs) {
          json rows = json::array();
          for (Eigen::Index r = 0; r < c.rows(); ++r) {
            rows.push_back(std::vector<double>(c.row(r).begin(), c.row(r).end()));
          }
          j["coeffs_by_hour"].push_back(rows);
        }
        std::ofstream out(path);
        out << j.dump(2) << "\n";
      } else if (method == Method::ngr_ml_copula || method == Method::ngr_crps_copula) {
        const NgrModel& model = method == Method::ngr_ml_copula ? ngr_ml : ngr_crps;
        json j;
        j["kind"] = method == Method::ngr_ml_copula ? "ngr_ml" : "ngr_crps";
        j["sigma_min"] = model.sigma_min;
        j["hours"] = json::array();
        for (const auto& p : model.hours) {
          j["hours"].push_back({{"b0", p.b0}, {"b1", p.b1}, {"c0", p.c0}, {"c1", p.c1}});
        }
        std::ofstream out(path);
        out << j.dump(2) << "\n";
      }
    }
    const bool copula_used = needs(Method::qra_copula) || needs(Method::ngr_ml_copula) ||
                             needs(Method::ngr_crps_copula);
    if (copula_used) {
      json j;
      j["kind"] = "gaussian_copula";
      j["correlation"] = json::array();
      for (int r = 0; r < copula.dims(); ++r) {
        j["correlation"].push_back(
            std::vector<double>(copula.correlation.row(r).begin(), copula.correlation.row(r).end()));
      }
      std::ofstream out(out_dir / "models" / "copula.json");
      out << j.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(stage("models") + e.what());
  }

  return result;
}

std::pair<double, double> rescore_run(const std::string& run_dir, const std::string& method) {
  const fs::path dir = fs::path(run_dir) / "scenarios" / method;
  if (!fs::exists(dir)) throw std::runtime_error("rescore_run: no scenarios under " + dir.string());
  const auto actuals = read_actuals_csv((fs::path(run_dir) / "actuals.csv").string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("rescore_run: no scenario csvs in " + dir.string());

  double es_sum = 0.0, crps_sum = 0.0;
  for (const auto& file : files) {
    const std::string date = file.stem().string();
    const auto it = actuals.find(date);
    if (it == actuals.end()) throw std::runtime_error("rescore_run: no actuals for " + date);
    const Eigen::MatrixXd scenarios = read_scenario_csv(file.string());
    const DayScore s = score_scenarios(scenarios, it->second);
    es_sum += s.es;
    crps_sum += s.crps;
  }
  return {es_sum / static_cast<double>(files.size()), crps_sum / static_cast<double>(files.size())};
}

}  // namespace epf
