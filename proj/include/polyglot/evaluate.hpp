#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "polyglot/corpus.hpp"
#include "polyglot/features.hpp"
#include "polyglot/gbdt.hpp"
#include "polyglot/linear.hpp"

namespace polyglot::evaluate {

/// Positive class is "polyglot".
struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Ratios in [0, 1]. A zero denominator yields 0 with its flag set.
struct Metrics {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
  bool accuracy_undefined = false, precision_undefined = false, recall_undefined = false, f1_undefined = false;
  bool operator==(const Metrics&) const = default;
};

Metrics metrics_from(const ConfusionCounts& c);
/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

struct Row {
  ConfusionCounts counts;
  Metrics metrics;
  bool operator==(const Row&) const = default;
};

struct EvalReport {
  std::string detector;
  std::string corpus_digest;
  Row overall;
  /// Each method's polyglots scored against every monoglot.
  std::map<Method, Row> per_method;
  bool operator==(const EvalReport&) const = default;
};

struct Prediction {
  std::string path;  // as written in the manifest
  int label = 0;
};

/// Predictions must cover the manifest's test split exactly; throws
/// CoverageMismatch otherwise.
EvalReport score(const std::vector<Prediction>& predictions, const corpus::Manifest& manifest,
                 const std::string& detector_name = "");

/// A trained classifier of either kind, as read from disk.
struct LoadedModel {
  std::variant<gbdt::Model, linear::Model> model;

  features::Layout layout() const;
  std::size_t width() const;
  double predict_proba(const std::vector<double>& x) const;
};

/// Reads a gbdt or linear model file; throws CorruptModel.
LoadedModel load_model(const std::string& path);

struct DetectorSpec {
  enum class Kind { Strict, Scan, Model };
  Kind kind = Kind::Strict;
  std::string model_path;
  double threshold = 0.5;

  /// "strict", "scan", "model:<path>" or "model:<path>@<threshold>".
  static DetectorSpec parse(const std::string& text);
  std::string name() const;
};

/// One prediction per test-split entry, in manifest order. Throws
/// ModelLayoutMismatch when a model's width does not match its layout.
std::vector<Prediction> run_detector(const DetectorSpec& detector, const corpus::Manifest& manifest);

/// Fixed-width table: columns Accuracy, Precision, Recall, F1 in percent with
/// two decimals; rows Overall, Stack, Parasite, Zipper, Cavity.
std::string emit_text(const EvalReport& r);
/// Versioned JSON carrying counts, from which metrics are recomputed on read.
std::string emit_json(const EvalReport& r);
EvalReport parse_json(const std::string& text);

}  // namespace polyglot::evaluate
