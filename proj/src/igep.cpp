#include "epf/igep.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

namespace epf {

void EnsembleForecast::validate() const {
  if (values.rows() != 24) throw std::invalid_argument("EnsembleForecast: D must be 24");
  if (values.cols() < 2) throw std::invalid_argument("EnsembleForecast: need M >= 2 members");
  if (!values.allFinite()) throw std::invalid_argument("EnsembleForecast: non-finite entry");
}

GeneratorParams GeneratorParams::initial(int dims, int j_latent) {
  GeneratorParams p;
  p.alpha = Eigen::VectorXd::Zero(dims);
  p.beta = Eigen::VectorXd::Ones(dims);
  p.gamma = Eigen::MatrixXd::Identity(dims, dims);
  p.omega = Eigen::MatrixXd::Zero(dims, j_latent);
  return p;
}

GeneratorParams GeneratorParams::zeros(int dims, int j_latent) {
  GeneratorParams p;
  p.alpha = Eigen::VectorXd::Zero(dims);
  p.beta = Eigen::VectorXd::Zero(dims);
  p.gamma = Eigen::MatrixXd::Zero(dims, dims);
  p.omega = Eigen::MatrixXd::Zero(dims, j_latent);
  return p;
}

std::size_t GeneratorParams::parameter_count() const {
  return static_cast<std::size_t>(alpha.size()) + static_cast<std::size_t>(beta.size()) +
         static_cast<std::size_t>(gamma.size()) + static_cast<std::size_t>(omega.size());
}

double GeneratorParams::squared_frobenius() const {
  return alpha.squaredNorm() + beta.squaredNorm() + gamma.squaredNorm() + omega.squaredNorm();
}

bool GeneratorParams::all_finite() const {
  return alpha.allFinite() && beta.allFinite() && gamma.allFinite() && omega.allFinite();
}

void LatentSpec::validate() const {
  if (j_independent < 0) throw std::invalid_argument("LatentSpec: J must be >= 0");
  if (!(independent_halfwidth > 0.0)) {
    throw std::invalid_argument("LatentSpec: independent halfwidth must be positive");
  }
  if ((delta.array() < 0.0).any() || !delta.allFinite()) {
    throw std::invalid_argument("LatentSpec: delta must be finite and >= 0");
  }
}

Eigen::VectorXd sample_latent(const LatentSpec& spec, Rng& rng) {
  spec.validate();
  Eigen::VectorXd z(spec.total());
  for (int d = 0; d < spec.dims(); ++d) {
    z[d] = rng.uniform(-spec.delta[d], spec.delta[d]);
  }
  const double w = spec.independent_halfwidth;
  for (int j = 0; j < spec.j_independent; ++j) {
    z[spec.dims() + j] = rng.uniform(-w, w);
  }
  return z;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (scenarios_per_example < 2) {
    throw std::invalid_argument("TrainConfig: scenarios_per_example must be >= 2");
  }
  if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (j_latent < 0) throw std::invalid_argument("TrainConfig: j_latent must be >= 0");
  if (fixed_delta && !(*fixed_delta >= 0.0)) {
    throw std::invalid_argument("TrainConfig: fixed_delta must be >= 0");
  }
}

EnsembleStats ensemble_stats(const Eigen::MatrixXd& x) {
  if (x.cols() < 2) throw std::invalid_argument("ensemble_stats: need M >= 2 members");
  EnsembleStats s;
  s.xbar = x.rowwise().mean();
  s.delta = 0.5 * (x.rowwise().maxCoeff() - x.rowwise().minCoeff());
  return s;
}

Eigen::VectorXd generate(const GeneratorParams& theta, const Eigen::VectorXd& xbar,
                         const Eigen::VectorXd& z) {
  const int d = theta.dims();
  const int j = theta.j_latent();
  if (xbar.size() != d || z.size() != d + j) {
    throw std::invalid_argument("generate: dimension mismatch");
  }
  return theta.alpha + theta.beta.cwiseProduct(xbar) + theta.gamma * z.head(d) +
         theta.omega * z.tail(j);
}

namespace {

// S x D scenario matrix for one example under pre-drawn latents.
Eigen::MatrixXd generate_block(const GeneratorParams& theta, const TrainExample& ex) {
  const Eigen::VectorXd base = theta.alpha + theta.beta.cwiseProduct(ex.xbar);
  Eigen::MatrixXd yhat = ex.u * theta.gamma.transpose();
  if (theta.j_latent() > 0) yhat.noalias() += ex.v * theta.omega.transpose();
  yhat.rowwise() += base.transpose();
  return yhat;
}

void check_batch(const GeneratorParams& theta, std::span<const TrainExample> batch,
                 const TrainConfig& cfg) {
  cfg.validate();
  if (batch.empty()) throw std::invalid_argument("es_loss: empty batch");
  for (const auto& ex : batch) {
    if (ex.xbar.size() != theta.dims() || ex.y.size() != theta.dims() ||
        ex.u.cols() != theta.dims() || ex.v.cols() != theta.j_latent() ||
        ex.u.rows() != ex.v.rows() || ex.u.rows() < 2) {
      throw std::invalid_argument("es_loss: batch example shape mismatch");
    }
  }
}

}  // namespace

double es_loss(const GeneratorParams& theta, std::span<const TrainExample> batch,
               const TrainConfig& cfg) {
  check_batch(theta, batch, cfg);
  double total = 0.0;
  for (const auto& ex : batch) {
    const Eigen::MatrixXd yhat = generate_block(theta, ex);
    const Eigen::Index s = yhat.rows();
    double data_term = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      data_term += (yhat.row(i).transpose() - ex.y).norm();
    }
    data_term /= static_cast<double>(s);
    double pair_sum = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = i + 1; j < s; ++j) {
        pair_sum += (yhat.row(i) - yhat.row(j)).norm();
      }
    }
    const double pair_term =
        2.0 * pair_sum / (2.0 * static_cast<double>(s) * static_cast<double>(s - 1));
    total += data_term - pair_term;
  }
  return total / static_cast<double>(batch.size()) + cfg.lambda * theta.squared_frobenius();
}

GeneratorParams grad_es_loss(const GeneratorParams& theta, std::span<const TrainExample> batch,
                             const TrainConfig& cfg) {
  check_batch(theta, batch, cfg);
  GeneratorParams g = GeneratorParams::zeros(theta.dims(), theta.j_latent());
  const double n = static_cast<double>(batch.size());

  for (const auto& ex : batch) {
    const Eigen::MatrixXd yhat = generate_block(theta, ex);
    const Eigen::Index s = yhat.rows();
    const double w_data = 1.0 / (n * static_cast<double>(s));

    // Data term: direction r/||r|| through the linear map. alpha and beta see
    // every scenario; gamma and omega pick up the scenario's own latents.
    for (Eigen::Index i = 0; i < s; ++i) {
      const Eigen::VectorXd r = yhat.row(i).transpose() - ex.y;
      const double norm = r.norm();
      if (norm == 0.0) continue;  // subgradient 0 at the kink
      const Eigen::VectorXd dir = (w_data / norm) * r;
      g.alpha += dir;
      g.beta += dir.cwiseProduct(ex.xbar);
      g.gamma.noalias() += dir * ex.u.row(i);
      g.omega.noalias() += dir * ex.v.row(i);
    }

    // Diversity term: alpha and beta cancel inside scenario differences, so
    // only gamma and omega receive gradient. Unordered pairs carry twice the
    // per-ordered-pair weight.
    const double w_pair = 1.0 / (n * static_cast<double>(s) * static_cast<double>(s - 1));
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = i + 1; j < s; ++j) {
        const Eigen::VectorXd d = (yhat.row(i) - yhat.row(j)).transpose();
        const double norm = d.norm();
        if (norm == 0.0) continue;
        const Eigen::VectorXd dir = (w_pair / norm) * d;
        g.gamma.noalias() -= dir * (ex.u.row(i) - ex.u.row(j));
        g.omega.noalias() -= dir * (ex.v.row(i) - ex.v.row(j));
      }
    }
  }

  if (cfg.lambda != 0.0) {
    g.alpha += 2.0 * cfg.lambda * theta.alpha;
    g.beta += 2.0 * cfg.lambda * theta.beta;
    g.gamma += 2.0 * cfg.lambda * theta.gamma;
    g.omega += 2.0 * cfg.lambda * theta.omega;
  }
  return g;
}

AdamState AdamState::zeros_like(const GeneratorParams& theta) {
  AdamState st;
  st.m = GeneratorParams::zeros(theta.dims(), theta.j_latent());
  st.v = GeneratorParams::zeros(theta.dims(), theta.j_latent());
  st.step = 0;
  return st;
}

namespace {

void adam_update_block(Eigen::Map<Eigen::ArrayXd> theta, Eigen::Map<Eigen::ArrayXd> m,
                       Eigen::Map<Eigen::ArrayXd> v, const Eigen::Map<const Eigen::ArrayXd> g,
                       const TrainConfig& cfg, double bc1, double bc2) {
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
  v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.square();
  theta -= cfg.adam_eta * (m / bc1) / ((v / bc2).sqrt() + cfg.adam_epsilon);
}

Eigen::Map<Eigen::ArrayXd> as_array(Eigen::VectorXd& v) { return {v.data(), v.size()}; }
Eigen::Map<Eigen::ArrayXd> as_array(Eigen::MatrixXd& m) { return {m.data(), m.size()}; }
Eigen::Map<const Eigen::ArrayXd> as_array(const Eigen::VectorXd& v) { return {v.data(), v.size()}; }
Eigen::Map<const Eigen::ArrayXd> as_array(const Eigen::MatrixXd& m) { return {m.data(), m.size()}; }

}  // namespace

void adam_step(GeneratorParams& theta, AdamState& state, const GeneratorParams& grad,
               const TrainConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
  adam_update_block(as_array(theta.alpha), as_array(state.m.alpha), as_array(state.v.alpha),
                    as_array(grad.alpha), cfg, bc1, bc2);
  adam_update_block(as_array(theta.beta), as_array(state.m.beta), as_array(state.v.beta),
                    as_array(grad.beta), cfg, bc1, bc2);
  adam_update_block(as_array(theta.gamma), as_array(state.m.gamma), as_array(state.v.gamma),
                    as_array(grad.gamma), cfg, bc1, bc2);
  adam_update_block(as_array(theta.omega), as_array(state.m.omega), as_array(state.v.omega),
                    as_array(grad.omega), cfg, bc1, bc2);
}

TrainResult train(std::span<const TrainingPair> data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("train: empty data");
  const int dims = static_cast<int>(data.front().y.size());
  for (const auto& p : data) {
    if (p.y.size() != dims || p.x.rows() != dims || p.x.cols() < 2) {
      throw std::invalid_argument("train: inconsistent example shapes");
    }
  }

  // Per-example stats are fixed by the data; compute them once.
  std::vector<EnsembleStats> stats;
  stats.reserve(data.size());
  for (const auto& p : data) {
    stats.push_back(ensemble_stats(p.x));
    if (cfg.fixed_delta) stats.back().delta.setConstant(*cfg.fixed_delta);
  }

  GeneratorParams theta = GeneratorParams::initial(dims, cfg.j_latent);
  AdamState adam = AdamState::zeros_like(theta);
  Rng rng(cfg.seed);
  const int s_train = cfg.scenarios_per_example;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<TrainExample> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int num_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) {
        const auto& st = stats[order[k]];
        TrainExample ex;
        ex.xbar = st.xbar;
        ex.y = data[order[k]].y;
        ex.u.resize(s_train, dims);
        ex.v.resize(s_train, cfg.j_latent);
        for (int s = 0; s < s_train; ++s) {
          for (int d = 0; d < dims; ++d) ex.u(s, d) = rng.uniform(-st.delta[d], st.delta[d]);
          for (int j = 0; j < cfg.j_latent; ++j) ex.v(s, j) = rng.uniform(-1.0, 1.0);
        }
        batch.push_back(std::move(ex));
      }
      const double loss = es_loss(theta, batch, cfg);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(num_batches));
      }
      const GeneratorParams grad = grad_es_loss(theta, batch, cfg);
      adam_step(theta, adam, grad, cfg);
      epoch_loss += loss;
      ++num_batches;
    }
    result.epoch_loss.push_back(epoch_loss / num_batches);
  }
  result.params = std::move(theta);
  return result;
}

ScenarioSet predict_scenarios(const GeneratorParams& theta, const EnsembleForecast& forecast,
                              int num_scenarios, const Standardizer& standardizer, Rng& rng,
                              std::optional<double> fixed_delta) {
  forecast.validate();
  if (num_scenarios < 1) throw std::invalid_argument("predict_scenarios: S must be >= 1");
  if (forecast.values.rows() != theta.dims()) {
    throw std::invalid_argument("predict_scenarios: dimension mismatch");
  }
  const Eigen::MatrixXd x_std = forecast.values.unaryExpr(
      [&](double v) { return standardizer.apply(v); });
  EnsembleStats st = ensemble_stats(x_std);
  if (fixed_delta) st.delta.setConstant(*fixed_delta);
  LatentSpec spec;
  spec.delta = st.delta;
  spec.j_independent = theta.j_latent();

  ScenarioSet out;
  out.day = forecast.day;
  out.scenarios.resize(num_scenarios, theta.dims());
  for (int s = 0; s < num_scenarios; ++s) {
    const Eigen::VectorXd z = sample_latent(spec, rng);
    const Eigen::VectorXd yhat = generate(theta, st.xbar, z);
    out.scenarios.row(s) = yhat.unaryExpr([&](double v) { return standardizer.invert(v); });
  }
  return out;
}

using nlohmann::json;

std::string IgepModel::to_json() const {
  json j;
  j["D"] = params.dims();
  j["J"] = params.j_latent();
  j["alpha"] = std::vector<double>(params.alpha.data(), params.alpha.data() + params.alpha.size());
  j["beta"] = std::vector<double>(params.beta.data(), params.beta.data() + params.beta.size());
  auto matrix_rows = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(m.rows());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      rows.emplace_back(m.row(r).begin(), m.row(r).end());
    }
    return rows;
  };
  j["gamma"] = matrix_rows(params.gamma);
  j["omega"] = matrix_rows(params.omega);
  j["standardizer"] = {{"mean", standardizer.mean()}, {"std", standardizer.std()}};
  j["seed"] = config.seed;
  j["config"] = {{"batch_size", config.batch_size},
                 {"scenarios_per_example", config.scenarios_per_example},
                 {"lambda", config.lambda},
                 {"epochs", config.epochs},
                 {"j_latent", config.j_latent},
                 {"adam_eta", config.adam_eta},
                 {"adam_beta1", config.adam_beta1},
                 {"adam_beta2", config.adam_beta2},
                 {"adam_epsilon", config.adam_epsilon}};
  if (config.fixed_delta) j["config"]["fixed_delta"] = *config.fixed_delta;
  return j.dump(2);
}

IgepModel IgepModel::from_json(const std::string& text) {
  const json j = json::parse(text);
  const int dims = j.at("D").get<int>();
  const int jl = j.at("J").get<int>();
  IgepModel model;
  model.params = GeneratorParams::zeros(dims, jl);
  const auto alpha = j.at("alpha").get<std::vector<double>>();
  const auto beta = j.at("beta").get<std::vector<double>>();
  if (static_cast<int>(alpha.size()) != dims || static_cast<int>(beta.size()) != dims) {
    throw std::runtime_error("IgepModel: alpha/beta size mismatch");
  }
  model.params.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), dims);
  model.params.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), dims);
  auto load_matrix = [](const json& rows, Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const auto row = rows.at(r).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
        throw std::runtime_error("IgepModel: matrix row size mismatch");
      }
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[c];
    }
  };
  load_matrix(j.at("gamma"), model.params.gamma);
  load_matrix(j.at("omega"), model.params.omega);
  model.standardizer = Standardizer(j.at("standardizer").at("mean").get<double>(),
                                    j.at("standardizer").at("std").get<double>());
  const json& c = j.at("config");
  model.config.batch_size = c.at("batch_size").get<int>();
  model.config.scenarios_per_example = c.at("scenarios_per_example").get<int>();
  model.config.lambda = c.at("lambda").get<double>();
  model.config.epochs = c.at("epochs").get<int>();
  model.config.j_latent = c.at("j_latent").get<int>();
  model.config.adam_eta = c.at("adam_eta").get<double>();
  model.config.adam_beta1 = c.at("adam_beta1").get<double>();
  model.config.adam_beta2 = c.at("adam_beta2").get<double>();
  model.config.adam_epsilon = c.at("adam_epsilon").get<double>();
  model.config.seed = j.at("seed").get<std::uint64_t>();
  if (c.contains("fixed_delta")) model.config.fixed_delta = c.at("fixed_delta").get<double>();
  return model;
}

}  // namespace epf
