#include "polyglot/linear.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polyglot/error.hpp"

namespace polyglot::linear {

namespace {

std::vector<double> transform(const std::vector<double>& x, const std::vector<double>& mean,
                              const std::vector<double>& scale) {
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (std::log1p(std::max(0.0, x[j])) - mean[j]) / scale[j];
  return z;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double Model::predict_proba(const std::vector<double>& x) const {
  if (x.size() != weights.size()) throw Error(ErrorCode::DimensionMismatch, "feature width");
  const auto z = transform(x, mean, scale);
  double m = bias;
  for (std::size_t j = 0; j < z.size(); ++j) m += weights[j] * z[j];
  return 1.0 / (1.0 + std::exp(-m));
}

int Model::classify(const std::vector<double>& x, double threshold) const {
  return predict_proba(x) >= threshold ? 1 : 0;
}

Model train(const Matrix& x, const std::vector<int>& y, const Params& params, int layout_version) {
  if (x.empty() || x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "rows and labels differ");
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  for (const auto& row : x)
    if (row.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<long>(n)) throw Error(ErrorCode::DegenerateLabels, "need both classes");

  Model m;
  m.layout_version = layout_version;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += std::log1p(std::max(0.0, row[j]));
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = std::log1p(std::max(0.0, row[j])) - m.mean[j];
      m.scale[j] += c * c;
    }
  for (auto& v : m.scale) v = v > 0 ? std::sqrt(v / static_cast<double>(n)) : 1.0;

  Matrix z;
  z.reserve(n);
  for (const auto& row : x) z.push_back(transform(row, m.mean, m.scale));

  // Hessian of the mean log-loss is at most 0.25 * E[x x^T]; its trace
  // (bias column included) bounds the largest eigenvalue.
  double trace = 1.0;
  for (const auto& row : z)
    for (double v : row) trace += v * v / static_cast<double>(n);
  const double step = 1.0 / (0.25 * trace + params.l2);

  m.weights.assign(d, 0.0);
  std::vector<double> margin(n), grad(d);
  const auto loss_of = [&] {
    double total = 0, reg = 0;
    for (std::size_t i = 0; i < n; ++i) total += softplus(margin[i]) - (y[i] ? margin[i] : 0.0);
    for (double w : m.weights) reg += w * w;
    return total / static_cast<double>(n) + 0.5 * params.l2 * reg;
  };
  const auto refresh = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double s = m.bias;
      for (std::size_t j = 0; j < d; ++j) s += m.weights[j] * z[i][j];
      margin[i] = s;
    }
  };
  refresh();
  m.loss_history.push_back(loss_of());
  for (int e = 0; e < params.epochs; ++e) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = 1.0 / (1.0 + std::exp(-margin[i])) - y[i];
      gb += r;
      for (std::size_t j = 0; j < d; ++j) grad[j] += r * z[i][j];
    }
    for (std::size_t j = 0; j < d; ++j)
      m.weights[j] -= step * (grad[j] / static_cast<double>(n) + params.l2 * m.weights[j]);
    m.bias -= step * gb / static_cast<double>(n);
    refresh();
    m.loss_history.push_back(loss_of());
  }
  return m;
}

namespace {

std::string hex(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, end);
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptModel, why); }

double read_hex(std::istream& in) {
  std::string s;
  double v = 0;
  if (!(in >> s)) corrupt("truncated linear model");
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
  if (ec != std::errc() || end != s.data() + s.size()) corrupt("bad number " + s);
  return v;
}

}  // namespace

std::string serialize(const Model& m) {
  std::ostringstream out;
  out << "linear 1\nlayout_version " << m.layout_version << "\nfeatures " << m.weights.size() << "\n";
  out << "bias " << hex(m.bias) << "\n";
  for (std::size_t j = 0; j < m.weights.size(); ++j)
    out << hex(m.mean[j]) << ' ' << hex(m.scale[j]) << ' ' << hex(m.weights[j]) << "\n";
  out << "end\n";
  return out.str();
}

Model deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  int version = 0;
  std::size_t d = 0;
  Model m;
  if (!(in >> word >> version) || word != "linear" || version != 1) corrupt("not a linear model");
  if (!(in >> word >> m.layout_version) || word != "layout_version") corrupt("missing layout_version");
  if (!(in >> word >> d) || word != "features") corrupt("missing features");
  if (!(in >> word) || word != "bias") corrupt("missing bias");
  m.bias = read_hex(in);
  for (std::size_t j = 0; j < d; ++j) {
    m.mean.push_back(read_hex(in));
    m.scale.push_back(read_hex(in));
    m.weights.push_back(read_hex(in));
  }
  if (!(in >> word) || word != "end") corrupt("missing end marker");
  return m;
}

void save(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << serialize(m);
  if (!out) throw Error(ErrorCode::IoFailure, path);
}

Model load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, path);
  std::ostringstream s;
  s << in.rdbuf();
  return deserialize(s.str());
}

}  // namespace polyglot::linear
