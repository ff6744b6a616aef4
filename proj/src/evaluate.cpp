#include "polyglot/evaluate.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polyglot/error.hpp"
#include "polyglot/magic.hpp"

namespace polyglot::evaluate {

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double f1_score(double precision, double recall) {
  return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Metrics metrics_from(const ConfusionCounts& c) {
  Metrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total(), m.accuracy_undefined);
  m.precision = ratio(c.tp, c.tp + c.fp, m.precision_undefined);
  m.recall = ratio(c.tp, c.tp + c.fn, m.recall_undefined);
  m.f1_undefined = m.precision_undefined || m.recall_undefined || m.precision + m.recall == 0;
  m.f1 = m.f1_undefined ? 0.0 : f1_score(m.precision, m.recall);
  return m;
}

EvalReport score(const std::vector<Prediction>& predictions, const corpus::Manifest& manifest,
                 const std::string& detector_name) {
  std::map<std::string, const corpus::ManifestEntry*> expected;
  for (const auto& e : manifest.entries)
    if (e.split == corpus::Split::Test) expected[e.path] = &e;
  std::set<std::string> seen;
  for (const auto& p : predictions) {
    if (!expected.count(p.path)) throw Error(ErrorCode::CoverageMismatch, p.path + " is not in the test split");
    if (!seen.insert(p.path).second) throw Error(ErrorCode::CoverageMismatch, p.path + " predicted twice");
  }
  if (seen.size() != expected.size())
    throw Error(ErrorCode::CoverageMismatch, std::to_string(expected.size() - seen.size()) + " test files lack predictions");

  EvalReport r;
  r.detector = detector_name;
  r.corpus_digest = corpus::manifest_digest(manifest);
  ConfusionCounts negatives;
  std::map<Method, ConfusionCounts> positives;
  for (const auto& p : predictions) {
    const auto& e = *expected.at(p.path);
    const bool said = p.label == 1;
    if (e.label == 1) {
      auto& c = positives[e.method.value_or(Method::Stack)];
      (said ? c.tp : c.fn) += 1;
    } else {
      (said ? negatives.fp : negatives.tn) += 1;
    }
  }
  r.overall.counts = negatives;
  for (Method m : kAllMethods) {
    ConfusionCounts c = negatives;
    c.tp = positives[m].tp;
    c.fn = positives[m].fn;
    r.per_method[m] = {c, metrics_from(c)};
    r.overall.counts.tp += c.tp;
    r.overall.counts.fn += c.fn;
  }
  r.overall.metrics = metrics_from(r.overall.counts);
  return r;
}

features::Layout LoadedModel::layout() const {
  const int v = std::visit([](const auto& m) { return m.layout_version; }, model);
  return v == 2 ? features::Layout::Augmented : features::Layout::Plain;
}

std::size_t LoadedModel::width() const {
  if (const auto* g = std::get_if<gbdt::Model>(&model)) return g->n_features;
  return std::get<linear::Model>(model).weights.size();
}

double LoadedModel::predict_proba(const std::vector<double>& x) const {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, path);
  std::ostringstream s;
  s << in.rdbuf();
  const std::string text = s.str();
  if (text.rfind("gbdt ", 0) == 0) return {gbdt::deserialize(text)};
  if (text.rfind("linear ", 0) == 0) return {linear::deserialize(text)};
  throw Error(ErrorCode::CorruptModel, path + ": unknown model kind");
}

DetectorSpec DetectorSpec::parse(const std::string& text) {
  DetectorSpec d;
  if (text == "strict") return d;
  if (text == "scan") {
    d.kind = Kind::Scan;
    return d;
  }
  if (text.rfind("model:", 0) == 0) {
    d.kind = Kind::Model;
    d.model_path = text.substr(6);
    const auto at = d.model_path.rfind('@');
    if (at != std::string::npos) {
      try {
        d.threshold = std::stod(d.model_path.substr(at + 1));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad threshold in " + text);
      }
      d.model_path.resize(at);
    }
    if (d.model_path.empty()) throw Error(ErrorCode::InvalidArgument, "model detector needs a path");
    return d;
  }
  throw Error(ErrorCode::InvalidArgument, "detector must be strict, scan or model:<path>[@threshold]");
}

std::string DetectorSpec::name() const {
  switch (kind) {
    case Kind::Strict: return "strict";
    case Kind::Scan: return "scan";
    case Kind::Model: break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "@%g", threshold);
  return "model:" + model_path + buf;
}

std::vector<Prediction> run_detector(const DetectorSpec& detector, const corpus::Manifest& manifest) {
  std::optional<LoadedModel> model;
  if (detector.kind == DetectorSpec::Kind::Model) {
    model = load_model(detector.model_path);
    if (model->width() != features::width_of(model->layout()))
      throw Error(ErrorCode::ModelLayoutMismatch, "model has " + std::to_string(model->width()) +
                                                      " features but its layout needs " +
                                                      std::to_string(features::width_of(model->layout())));
  }
  std::vector<Prediction> out;
  for (const auto& e : manifest.entries) {
    if (e.split != corpus::Split::Test) continue;
    const Bytes b = read_file(manifest.path_of(e));
    int label = 0;
    switch (detector.kind) {
      case DetectorSpec::Kind::Strict: label = magic::identify_strict(b).is_polyglot; break;
      case DetectorSpec::Kind::Scan: label = magic::identify_scan(b).is_polyglot; break;
      case DetectorSpec::Kind::Model:
        label = model->predict_proba(features::featurize(b, model->layout()).values) >= detector.threshold;
        break;
    }
    out.push_back({e.path, label});
  }
  return out;
}

namespace {

std::string cell(double v, bool undefined) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%%s", v * 100.0, undefined ? "*" : "");
  return buf;
}

std::string capitalized(Method m) {
  std::string s(polyglot::name_of(m));
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::string emit_text(const EvalReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "detector: %s\ncorpus:   %s\n", r.detector.c_str(), r.corpus_digest.c_str());
  out += line;
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s\n", "", "Accuracy", "Precision", "Recall", "F1");
  out += line;
  bool any_undefined = false;
  const auto row = [&](const std::string& name, const Row& x) {
    const auto& m = x.metrics;
    any_undefined |= m.accuracy_undefined || m.precision_undefined || m.recall_undefined || m.f1_undefined;
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s\n", name.c_str(),
                  cell(m.accuracy, m.accuracy_undefined).c_str(), cell(m.precision, m.precision_undefined).c_str(),
                  cell(m.recall, m.recall_undefined).c_str(), cell(m.f1, m.f1_undefined).c_str());
    out += line;
  };
  row("Overall", r.overall);
  for (Method m : kAllMethods) {
    auto it = r.per_method.find(m);
    row(capitalized(m), it == r.per_method.end() ? Row{{}, metrics_from({})} : it->second);
  }
  if (any_undefined) out += "* undefined: zero denominator, reported as 0\n";
  return out;
}

std::string emit_json(const EvalReport& r) {
  using json = nlohmann::ordered_json;
  const auto row = [](const Row& x) {
    const auto& c = x.counts;
    const auto& m = x.metrics;
    json undefined = json::array();
    if (m.accuracy_undefined) undefined.push_back("accuracy");
    if (m.precision_undefined) undefined.push_back("precision");
    if (m.recall_undefined) undefined.push_back("recall");
    if (m.f1_undefined) undefined.push_back("f1");
    return json{{"tp", c.tp},           {"fp", c.fp},       {"tn", c.tn},
                {"fn", c.fn},           {"accuracy", m.accuracy}, {"precision", m.precision},
                {"recall", m.recall},   {"f1", m.f1},       {"undefined", undefined}};
  };
  json j;
  j["format"] = "polyglot-eval";
  j["version"] = 1;
  j["detector"] = r.detector;
  j["corpus_digest"] = r.corpus_digest;
  j["overall"] = row(r.overall);
  json per = json::object();
  for (const auto& [m, x] : r.per_method) per[std::string(polyglot::name_of(m))] = row(x);
  j["per_method"] = per;
  return j.dump(2) + "\n";
}

EvalReport parse_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "polyglot-eval" || j.at("version") != 1)
      throw Error(ErrorCode::InvalidArgument, "not a version 1 evaluation report");
    const auto row = [](const nlohmann::json& x) {
      Row r;
      r.counts = {x.at("tp").get<std::size_t>(), x.at("fp").get<std::size_t>(), x.at("tn").get<std::size_t>(),
                  x.at("fn").get<std::size_t>()};
      r.metrics = metrics_from(r.counts);
      return r;
    };
    EvalReport r;
    r.detector = j.at("detector").get<std::string>();
    r.corpus_digest = j.at("corpus_digest").get<std::string>();
    r.overall = row(j.at("overall"));
    for (const auto& [k, v] : j.at("per_method").items()) {
      auto m = parse_method(k);
      if (!m) throw Error(ErrorCode::InvalidArgument, "unknown method " + k);
      r.per_method[*m] = row(v);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("report: ") + e.what());
  }
}

}  // namespace polyglot::evaluate
