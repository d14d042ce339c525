#include "epf/ensemble/gbdt.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace epf {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double weighted_mean(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                     const std::vector<int>& rows) {
  double sw = 0.0, swy = 0.0;
  for (int r : rows) {
    sw += w[r];
    swy += w[r] * y[r];
  }
  return sw > 0.0 ? swy / sw : 0.0;
}

}  // namespace

int RegressionTree::build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, const std::vector<bool>& is_binary,
                          std::vector<int>& rows, int depth, int max_depth,
                          int min_samples_leaf) {
  Node node;
  node.value = weighted_mean(y, w, rows);
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (depth >= max_depth || static_cast<int>(rows.size()) < 2 * min_samples_leaf ||
      rows.size() < 2) {
    return node_id;
  }

  double total_w = 0.0, total_wy = 0.0;
  for (int r : rows) {
    total_w += w[r];
    total_wy += w[r] * y[r];
  }
  if (!(total_w > 0.0)) return node_id;

  // Gain of a split is the increase of (sum wy)^2 / (sum w) over the two
  // sides relative to the parent; constant terms cancel.
  const double parent_score = total_wy * total_wy / total_w;
  Split best;

  const int num_features = static_cast<int>(X.cols());
  std::vector<int> sorted_rows;
  for (int f = 0; f < num_features; ++f) {
    if (is_binary[f]) {
      double w0 = 0.0, wy0 = 0.0;
      int n0 = 0;
      for (int r : rows) {
        if (X(r, f) < 0.5) {
          w0 += w[r];
          wy0 += w[r] * y[r];
          ++n0;
        }
      }
      const int n1 = static_cast<int>(rows.size()) - n0;
      if (n0 < min_samples_leaf || n1 < min_samples_leaf) continue;
      const double w1 = total_w - w0, wy1 = total_wy - wy0;
      if (!(w0 > 0.0) || !(w1 > 0.0)) continue;
      const double gain = wy0 * wy0 / w0 + wy1 * wy1 / w1 - parent_score;
      if (gain > best.gain) best = {f, 0.5, gain};
    } else {
      sorted_rows = rows;
      std::sort(sorted_rows.begin(), sorted_rows.end(),
                [&](int a, int b) { return X(a, f) < X(b, f); });
      double wl = 0.0, wyl = 0.0;
      for (std::size_t i = 0; i + 1 < sorted_rows.size(); ++i) {
        const int r = sorted_rows[i];
        wl += w[r];
        wyl += w[r] * y[r];
        const double xl = X(r, f), xr = X(sorted_rows[i + 1], f);
        if (xl == xr) continue;
        const int nl = static_cast<int>(i) + 1;
        const int nr = static_cast<int>(sorted_rows.size()) - nl;
        if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
        const double wr = total_w - wl, wyr = total_wy - wyl;
        if (!(wl > 0.0) || !(wr > 0.0)) continue;
        const double gain = wyl * wyl / wl + wyr * wyr / wr - parent_score;
        if (gain > best.gain) best = {f, 0.5 * (xl + xr), gain};
      }
    }
  }

  if (best.feature < 0 || !(best.gain > 0.0)) return node_id;

  std::vector<int> left_rows, right_rows;
  left_rows.reserve(rows.size());
  right_rows.reserve(rows.size());
  for (int r : rows) {
    (X(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);
  }
  if (left_rows.empty() || right_rows.empty()) return node_id;

  rows.clear();
  rows.shrink_to_fit();
  const int left = build(X, y, w, is_binary, left_rows, depth + 1, max_depth, min_samples_leaf);
  const int right = build(X, y, w, is_binary, right_rows, depth + 1, max_depth, min_samples_leaf);
  nodes_[node_id].feature = best.feature;
  nodes_[node_id].threshold = best.threshold;
  nodes_[node_id].left = left;
  nodes_[node_id].right = right;
  return node_id;
}

void RegressionTree::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, const std::vector<bool>& is_binary,
                         int max_depth, int min_samples_leaf) {
  if (X.rows() != y.size() || X.rows() != w.size()) {
    throw std::invalid_argument("RegressionTree: row count mismatch");
  }
  nodes_.clear();
  std::vector<int> rows(static_cast<std::size_t>(X.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  build(X, y, w, is_binary, rows, 0, max_depth, min_samples_leaf);
}

double RegressionTree::predict(const Eigen::RowVectorXd& x) const {
  int node = 0;
  while (nodes_[node].feature >= 0) {
    node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                             : nodes_[node].right;
  }
  return nodes_[node].value;
}

void GbdtModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                    const std::vector<bool>& is_binary, const GbdtSpec& spec) {
  if (spec.trees < 1 || !(spec.learning_rate > 0.0 && spec.learning_rate <= 1.0)) {
    throw std::invalid_argument("GbdtModel: invalid spec");
  }
  trees_.clear();
  round_losses_.clear();
  learning_rate_ = spec.learning_rate;

  std::vector<int> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), 0);
  base_ = weighted_mean(y, w, all);

  Eigen::VectorXd residual = y.array() - base_;
  const double total_w = w.sum();
  trees_.reserve(static_cast<std::size_t>(spec.trees));
  for (int t = 0; t < spec.trees; ++t) {
    RegressionTree tree;
    tree.fit(X, residual, w, is_binary, spec.max_depth, spec.min_samples_leaf);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      residual[i] -= learning_rate_ * tree.predict(X.row(i));
    }
    trees_.push_back(std::move(tree));
    round_losses_.push_back(residual.cwiseAbs2().dot(w) / total_w);
  }
}

double GbdtModel::predict(const Eigen::RowVectorXd& x) const {
  double out = base_;
  for (const auto& tree : trees_) out += learning_rate_ * tree.predict(x);
  return out;
}

}  // namespace epf
