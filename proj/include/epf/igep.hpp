#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epf/dataset.hpp"
#include "epf/dates.hpp"
#include "epf/rng.hpp"

namespace epf {

// One day's expert point forecasts: D output dimensions x M ensemble members.
struct EnsembleForecast {
  Date day;
  Eigen::MatrixXd values;  // D x M, EUR/MWh
  std::vector<std::string> model_names;

  void validate() const;
  Eigen::VectorXd member_mean() const { return values.rowwise().mean(); }
};

// S joint scenarios for one day, EUR/MWh.
struct ScenarioSet {
  Date day;
  Eigen::MatrixXd scenarios;  // S x D
};

// Parameters of the linear scenario generator
//   yhat = alpha + beta .* xbar + gamma * u + omega * v
// in standardized units.
struct GeneratorParams {
  Eigen::VectorXd alpha;  // D
  Eigen::VectorXd beta;   // D
  Eigen::MatrixXd gamma;  // D x D, weights on the adaptive latents
  Eigen::MatrixXd omega;  // D x J, weights on the independent latents

  // alpha = 0, beta = 1, gamma = I, omega = 0: in expectation the untrained
  // model reproduces the ensemble mean, with per-dimension spread taken
  // straight from the ensemble dispersion.
  static GeneratorParams initial(int dims, int j_latent);
  static GeneratorParams zeros(int dims, int j_latent);

  int dims() const { return static_cast<int>(alpha.size()); }
  int j_latent() const { return static_cast<int>(omega.cols()); }
  std::size_t parameter_count() const;
  double squared_frobenius() const;
  bool all_finite() const;
};

// Latent sampling layout: D adaptive uniforms U(-delta_d, +delta_d) followed
// by J independent uniforms U(-w, +w) with w = independent_halfwidth.
struct LatentSpec {
  Eigen::VectorXd delta;  // D half-ranges, >= 0
  int j_independent = 10;
  double independent_halfwidth = 1.0;

  int dims() const { return static_cast<int>(delta.size()); }
  int total() const { return dims() + j_independent; }
  void validate() const;
};

// z = [u; v], drawn deterministically from rng.
Eigen::VectorXd sample_latent(const LatentSpec& spec, Rng& rng);

struct TrainConfig {
  int batch_size = 3;
  int scenarios_per_example = 25;
  double lambda = 0.0;
  int epochs = 100;
  int j_latent = 10;
  double adam_eta = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-7;
  std::uint64_t seed = 0;
  // When set, every example uses this constant half-range for all adaptive
  // latents instead of the per-example ensemble dispersion (the
  // independent-latent model variant; 2.0 in standardized units).
  std::optional<double> fixed_delta;

  void validate() const;
};

// Per-dimension ensemble mean and half-range. Requires M >= 2 members.
struct EnsembleStats {
  Eigen::VectorXd xbar;
  Eigen::VectorXd delta;
};
EnsembleStats ensemble_stats(const Eigen::MatrixXd& x);

// One application of the generator, standardized units.
Eigen::VectorXd generate(const GeneratorParams& theta, const Eigen::VectorXd& xbar,
                         const Eigen::VectorXd& z);

// One training example with its pre-drawn latent draws. Loss and gradient
// must see identical latents, so the draws live in the batch rather than
// inside the loss.
struct TrainExample {
  Eigen::VectorXd xbar;  // D
  Eigen::VectorXd y;     // D
  Eigen::MatrixXd u;     // S x D
  Eigen::MatrixXd v;     // S x J
};

// Mean over the batch of the unbiased sample energy score plus
// lambda * ||theta||_F^2.
double es_loss(const GeneratorParams& theta, std::span<const TrainExample> batch,
               const TrainConfig& cfg);

// Exact analytic gradient of es_loss. Residuals or scenario differences with
// exactly zero norm contribute subgradient 0.
GeneratorParams grad_es_loss(const GeneratorParams& theta, std::span<const TrainExample> batch,
                             const TrainConfig& cfg);

struct AdamState {
  GeneratorParams m;
  GeneratorParams v;
  long step = 0;
  static AdamState zeros_like(const GeneratorParams& theta);
};

// Standard bias-corrected Adam update, epsilon added outside the square root.
void adam_step(GeneratorParams& theta, AdamState& state, const GeneratorParams& grad,
               const TrainConfig& cfg);

// Standardized ensemble matrix (D x M) and realized vector for one day.
struct TrainingPair {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

struct TrainResult {
  GeneratorParams params;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
};

// Minimizes the expected energy score by stochastic gradient descent: batches
// are reshuffled every epoch, latents are drawn fresh for every batch, and the
// whole trajectory is a deterministic function of cfg.seed.
TrainResult train(std::span<const TrainingPair> data, const TrainConfig& cfg);

// Standardizes x, draws S latent vectors, maps them through the generator and
// de-standardizes back to EUR/MWh.
ScenarioSet predict_scenarios(const GeneratorParams& theta, const EnsembleForecast& forecast,
                              int num_scenarios, const Standardizer& standardizer, Rng& rng,
                              std::optional<double> fixed_delta = std::nullopt);

// Trained model bundle as it is serialized to disk.
struct IgepModel {
  GeneratorParams params;
  Standardizer standardizer{0.0, 1.0};
  TrainConfig config;

  std::string to_json() const;
  static IgepModel from_json(const std::string& text);
};

}  // namespace epf
