#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace polyglot::gbdt {

using Matrix = std::vector<std::vector<double>>;

struct Params {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 5;
  double l2 = 1.0;
  std::size_t bins = 64;
  /// Weight of each positive (label 1) sample relative to a negative one.
  double positive_weight = 1.0;
};

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root

  double predict(const std::vector<double>& x) const;
};

struct Model {
  int layout_version = 1;
  std::size_t n_features = 0;
  double base_score = 0.0;  // initial log-odds
  std::vector<Tree> trees;
  /// Weighted mean log-loss on the training set: before the first tree,
  /// then after each tree.
  std::vector<double> loss_history;

  double margin(const std::vector<double>& x) const;
  double predict_proba(const std::vector<double>& x) const;
  int classify(const std::vector<double>& x, double threshold = 0.5) const;
};

/// Throws DegenerateLabels when only one class is present and
/// DimensionMismatch on ragged input.
Model train(const Matrix& x, const std::vector<int>& y, const Params& params, int layout_version = 1);

std::string serialize(const Model& m);
/// Throws CorruptModel on malformed or truncated text.
Model deserialize(const std::string& text);
void save(const Model& m, const std::string& path);
Model load(const std::string& path);

struct TuneResult {
  Params best;
  double best_f1 = 0.0;
  std::vector<std::pair<Params, double>> tried;
};

/// Grid search over tree count {100, 200, 400} and depth {3, 4, 6}, scored by
/// F1 on a stratified hold-out of `holdout` of the training rows.
TuneResult tune(const Matrix& x, const std::vector<int>& y, const Params& base, std::uint64_t seed,
                double holdout = 0.25);

}  // namespace polyglot::gbdt
