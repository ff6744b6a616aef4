#pragma once

#include <string>
#include <vector>

namespace polyglot::linear {

using Matrix = std::vector<std::vector<double>>;

struct Params {
  int epochs = 500;
  double l2 = 1e-3;
};

/// Logistic regression on standardized log1p features, trained by
/// full-batch gradient descent with a step of 1/L, where L bounds the
/// curvature of the regularized loss.
struct Model {
  int layout_version = 1;
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> loss_history;

  double predict_proba(const std::vector<double>& x) const;
  int classify(const std::vector<double>& x, double threshold = 0.5) const;
};

/// Throws DegenerateLabels or DimensionMismatch.
Model train(const Matrix& x, const std::vector<int>& y, const Params& params, int layout_version = 1);

std::string serialize(const Model& m);
Model deserialize(const std::string& text);
void save(const Model& m, const std::string& path);
Model load(const std::string& path);

}  // namespace polyglot::linear
