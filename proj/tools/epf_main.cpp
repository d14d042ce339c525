// Command line front end: synthetic data generation, rolling ensemble
// forecasts, the full backtest pipeline, fan-chart plotting, and re-scoring
// of emitted scenario files.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "epf/harness/backtest.hpp"
#include "epf/harness/svg.hpp"
#include "epf/harness/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

epf::BacktestConfig load_config(const std::string& path, std::uint64_t seed_override,
                                const std::string& out_override) {
  epf::BacktestConfig cfg;
  if (!path.empty()) cfg = epf::BacktestConfig::from_json_file(path);
  if (seed_override != 0) cfg.base_seed = seed_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate scenario forecasting for day-ahead electricity prices"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic market dataset CSV");
  int synth_years = 3;
  double synth_noise = 1.0;
  std::string synth_out = "market.csv";
  std::uint64_t synth_seed = 42;
  synth->add_option("--out", synth_out, "Output CSV path");
  synth->add_option("--years", synth_years, "Number of 365-day years");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--noise", synth_noise, "Noise scale (0 = deterministic prices)");

  auto* ensemble = app.add_subcommand("ensemble", "Rolling point forecasts + expert metrics");
  ensemble->add_option("--config", config_path, "Backtest config JSON");
  ensemble->add_option("--out", out_path, "Output directory");
  ensemble->add_option("--seed", seed, "Base seed override");

  auto* backtest = app.add_subcommand("backtest", "Full scenario-generation backtest");
  backtest->add_option("--config", config_path, "Backtest config JSON");
  backtest->add_option("--out", out_path, "Output directory");
  backtest->add_option("--seed", seed, "Base seed override");

  auto* plot = app.add_subcommand("plot", "Fan chart from an existing run directory");
  std::string plot_run, plot_method = "igep", plot_date, plot_out;
  plot->add_option("--run", plot_run, "Run directory (backtest output)")->required();
  plot->add_option("--method", plot_method, "Method whose scenarios to draw");
  plot->add_option("--date", plot_date, "Test day (YYYY-MM-DD)")->required();
  plot->add_option("--out", plot_out, "Output SVG path");

  auto* score = app.add_subcommand("score", "Re-score emitted scenario CSVs");
  std::string score_run, score_method = "igep";
  score->add_option("--run", score_run, "Run directory (backtest output)")->required();
  score->add_option("--method", score_method, "Method to score");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      epf::SyntheticConfig cfg;
      cfg.years = synth_years;
      cfg.seed = synth_seed;
      cfg.noise_scale = synth_noise;
      const epf::MarketDataset data = epf::generate_synthetic(cfg);
      epf::write_csv(data, synth_out);
      std::cout << "wrote " << data.num_days() << " days to " << synth_out << "\n";
      return 0;
    }

    if (ensemble->parsed()) {
      epf::BacktestConfig cfg = load_config(config_path, seed, out_path);
      const epf::MarketDataset data = cfg.data_csv.empty()
                                          ? epf::generate_synthetic(cfg.synthetic)
                                          : epf::ingest_csv(cfg.data_csv);
      const auto forecasts =
          epf::rolling_forecast(data, cfg.prob_train.start, cfg.test.end, cfg.rolling);
      fs::create_directories(cfg.out_dir);
      epf::write_forecasts_csv(forecasts, data, (fs::path(cfg.out_dir) / "forecasts.csv").string());
      const epf::ExpertMetrics metrics = epf::expert_metrics(forecasts, data);
      std::printf("%-10s %10s %10s\n", "model", "mae", "rmse");
      for (std::size_t i = 0; i < metrics.names.size(); ++i) {
        std::printf("%-10s %10.3f %10.3f\n", metrics.names[i].c_str(), metrics.mae[i],
                    metrics.rmse[i]);
      }
      return 0;
    }

    if (backtest->parsed()) {
      epf::BacktestConfig cfg = load_config(config_path, seed, out_path);
      const epf::BacktestResult result = epf::run_backtest(cfg);
      std::cout << epf::format_report(result.report);
      std::cout << "artifacts under " << cfg.out_dir << "\n";
      return 0;
    }

    if (plot->parsed()) {
      const fs::path run(plot_run);
      const Eigen::MatrixXd scenarios =
          epf::read_scenario_csv((run / "scenarios" / plot_method / (plot_date + ".csv")).string());
      const auto forecasts = epf::read_forecasts_csv((run / "forecasts.csv").string());
      const auto actuals = epf::read_actuals_csv((run / "actuals.csv").string());
      const epf::EnsembleForecast* forecast = nullptr;
      for (const auto& f : forecasts) {
        if (f.day.str() == plot_date) forecast = &f;
      }
      if (forecast == nullptr) throw std::runtime_error("no ensemble forecast for " + plot_date);
      const auto it = actuals.find(plot_date);
      if (it == actuals.end()) throw std::runtime_error("no actual prices for " + plot_date);
      const std::string out_file =
          plot_out.empty() ? (run / "plots" / (plot_date + "_" + plot_method + ".svg")).string()
                           : plot_out;
      fs::create_directories(fs::path(out_file).parent_path());
      epf::plot_scenarios(scenarios, *forecast, it->second, out_file);
      std::cout << "wrote " << out_file << "\n";
      return 0;
    }

    if (score->parsed()) {
      const auto [es, crps] = epf::rescore_run(score_run, score_method);
      std::printf("%s: es %.6f  crps %.6f\n", score_method.c_str(), es, crps);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
