#pragma once

#include <Eigen/Dense>
#include <vector>

namespace epf {

struct GbdtSpec {
  int trees = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 1;
};

// Axis-aligned regression tree, exact greedy splits on weighted squared
// error. Binary (one-hot) columns are scanned in O(N); continuous columns
// sort the node's rows.
class RegressionTree {
 public:
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
           const std::vector<bool>& is_binary, int max_depth, int min_samples_leaf);
  double predict(const Eigen::RowVectorXd& x) const;

 private:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;
  };
  int build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
            const std::vector<bool>& is_binary, std::vector<int>& rows, int depth, int max_depth,
            int min_samples_leaf);
  std::vector<Node> nodes_;
};

// Gradient boosting with squared loss on a weighted training set: each round
// fits a tree to the current residuals and steps by the learning rate.
class GbdtModel {
 public:
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
           const std::vector<bool>& is_binary, const GbdtSpec& spec);
  double predict(const Eigen::RowVectorXd& x) const;

  // Weighted training MSE after each boosting round; non-increasing.
  const std::vector<double>& round_losses() const { return round_losses_; }

 private:
  double base_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<RegressionTree> trees_;
  std::vector<double> round_losses_;
};

}  // namespace epf
