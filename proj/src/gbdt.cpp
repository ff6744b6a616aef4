#include "polyglot/gbdt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "polyglot/error.hpp"
#include "polyglot/rng.hpp"

namespace polyglot::gbdt {

double Tree::predict(const std::vector<double>& x) const {
  int at = 0;
  while (!nodes[at].is_leaf()) {
    const Node& n = nodes[at];
    at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[at].value;
}

double Model::margin(const std::vector<double>& x) const {
  if (x.size() != n_features) throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_features) + " features");
  double m = base_score;
  for (const auto& t : trees) m += t.predict(x);
  return m;
}

double Model::predict_proba(const std::vector<double>& x) const { return 1.0 / (1.0 + std::exp(-margin(x))); }

int Model::classify(const std::vector<double>& x, double threshold) const {
  return predict_proba(x) >= threshold ? 1 : 0;
}

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Binned {
  std::vector<std::vector<double>> cuts;          // per feature, ascending
  std::vector<std::vector<std::uint8_t>> bin;     // per feature, per sample
};

Binned bin_features(const Matrix& x, std::size_t bins) {
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  Binned b;
  b.cuts.resize(d);
  b.bin.assign(d, std::vector<std::uint8_t>(n));
  std::vector<double> col(n);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t i = 0; i < n; ++i) col[i] = x[i][f];
    std::sort(col.begin(), col.end());
    auto& cuts = b.cuts[f];
    for (std::size_t j = 1; j < bins; ++j) {
      const double c = col[j * n / bins];
      if (c < col.back() && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
    }
    if (cuts.empty() && col.front() < col.back()) cuts.push_back(col.front());
    for (std::size_t i = 0; i < n; ++i)
      b.bin[f][i] = static_cast<std::uint8_t>(std::lower_bound(cuts.begin(), cuts.end(), x[i][f]) - cuts.begin());
  }
  return b;
}

struct Builder {
  const Binned& binned;
  const Params& p;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  Tree tree;

  double score(double g, double h) const { return g * g / (h + p.l2); }

  int leaf(double g, double h) {
    Node n;
    n.value = -g / (h + p.l2) * p.learning_rate;
    tree.nodes.push_back(n);
    return static_cast<int>(tree.nodes.size() - 1);
  }

  int build(std::vector<std::size_t>& idx, int depth) {
    double g = 0, h = 0;
    for (auto i : idx) {
      g += grad[i];
      h += hess[i];
    }
    if (depth >= p.max_depth || idx.size() < 2 * std::max<std::size_t>(1, p.min_samples_leaf)) return leaf(g, h);

    const double parent = score(g, h);
    double best_gain = 0.0;
    int best_feature = -1;
    std::size_t best_bin = 0;
    std::vector<double> hg, hh;
    std::vector<std::size_t> hc;
    for (std::size_t f = 0; f < binned.cuts.size(); ++f) {
      const std::size_t nb = binned.cuts[f].size() + 1;
      if (nb < 2) continue;
      hg.assign(nb, 0.0);
      hh.assign(nb, 0.0);
      hc.assign(nb, 0);
      const auto& bf = binned.bin[f];
      for (auto i : idx) {
        hg[bf[i]] += grad[i];
        hh[bf[i]] += hess[i];
        ++hc[bf[i]];
      }
      double gl = 0, hl = 0;
      std::size_t cl = 0;
      for (std::size_t s = 0; s + 1 < nb; ++s) {
        gl += hg[s];
        hl += hh[s];
        cl += hc[s];
        const std::size_t cr = idx.size() - cl;
        if (cl < p.min_samples_leaf || cr < p.min_samples_leaf) continue;
        const double gain = score(gl, hl) + score(g - gl, h - hl) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_bin = s;
        }
      }
    }
    if (best_feature < 0) return leaf(g, h);

    const auto& bf = binned.bin[static_cast<std::size_t>(best_feature)];
    std::vector<std::size_t> left, right;
    for (auto i : idx) (bf[i] <= best_bin ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const int self = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[self].feature = best_feature;
    tree.nodes[self].threshold = binned.cuts[static_cast<std::size_t>(best_feature)][best_bin];
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    tree.nodes[self].left = l;
    tree.nodes[self].right = r;
    return self;
  }
};

double mean_loss(const std::vector<double>& margin, const std::vector<int>& y, const std::vector<double>& w) {
  double total = 0, weight = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += w[i] * (softplus(margin[i]) - (y[i] ? margin[i] : 0.0));
    weight += w[i];
  }
  return total / weight;
}

void check_shape(const Matrix& x, const std::vector<int>& y) {
  if (x.empty() || x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "rows and labels differ");
  for (const auto& row : x)
    if (row.size() != x.front().size()) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<long>(y.size())) throw Error(ErrorCode::DegenerateLabels, "need both classes");
}

}  // namespace

Model train(const Matrix& x, const std::vector<int>& y, const Params& params, int layout_version) {
  check_shape(x, y);
  const std::size_t n = x.size();
  Model m;
  m.layout_version = layout_version;
  m.n_features = x.front().size();

  std::vector<double> w(n);
  double wp = 0, wn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = y[i] ? params.positive_weight : 1.0;
    (y[i] ? wp : wn) += w[i];
  }
  m.base_score = std::log(wp / wn);

  const Binned binned = bin_features(x, std::clamp<std::size_t>(params.bins, 2, 256));
  std::vector<double> margin(n, m.base_score), grad(n), hess(n), step(n);
  double loss = mean_loss(margin, y, w);
  m.loss_history.push_back(loss);

  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = w[i] * (p - y[i]);
      hess[i] = w[i] * p * (1.0 - p);
    }
    Builder b{binned, params, grad, hess, {}};
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    b.build(all, 0);
    Tree tree = std::move(b.tree);

    // Newton leaves can overshoot where probabilities are already extreme;
    // halve the tree until the training loss does not go up.
    double next = loss;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) step[i] = margin[i] + tree.predict(x[i]);
      next = mean_loss(step, y, w);
      if (next <= loss) break;
      for (auto& node : tree.nodes) node.value *= 0.5;
    }
    if (next > loss) {
      for (auto& node : tree.nodes) node.value = 0.0;
      next = loss;
    } else {
      margin.swap(step);
    }
    loss = next;
    m.loss_history.push_back(loss);
    m.trees.push_back(std::move(tree));
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

double parse_hex(const std::string& s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
  if (ec != std::errc() || end != s.data() + s.size()) corrupt("bad number " + s);
  return v;
}

template <class T>
T expect(std::istream& in, const char* key) {
  std::string word;
  T value{};
  if (!(in >> word) || word != key || !(in >> value)) corrupt(std::string("expected ") + key);
  return value;
}

}  // namespace

std::string serialize(const Model& m) {
  std::ostringstream out;
  out << "gbdt 1\n";
  out << "layout_version " << m.layout_version << "\n";
  out << "features " << m.n_features << "\n";
  out << "base_score " << hex(m.base_score) << "\n";
  out << "trees " << m.trees.size() << "\n";
  for (const auto& t : m.trees) {
    out << "tree " << t.nodes.size() << "\n";
    for (const auto& n : t.nodes)
      out << n.feature << ' ' << hex(n.threshold) << ' ' << n.left << ' ' << n.right << ' ' << hex(n.value) << "\n";
  }
  out << "end\n";
  return out.str();
}

Model deserialize(const std::string& text) {
  std::istringstream in(text);
  Model m;
  if (expect<int>(in, "gbdt") != 1) corrupt("unknown model version");
  m.layout_version = expect<int>(in, "layout_version");
  m.n_features = expect<std::size_t>(in, "features");
  m.base_score = parse_hex(expect<std::string>(in, "base_score"));
  const auto count = expect<std::size_t>(in, "trees");
  for (std::size_t t = 0; t < count; ++t) {
    const auto size = expect<std::size_t>(in, "tree");
    if (size == 0) corrupt("empty tree");
    Tree tree;
    for (std::size_t k = 0; k < size; ++k) {
      Node n;
      std::string threshold, value;
      if (!(in >> n.feature >> threshold >> n.left >> n.right >> value)) corrupt("truncated tree");
      n.threshold = parse_hex(threshold);
      n.value = parse_hex(value);
      const bool leaf = n.feature < 0;
      const auto in_range = [&](int c) { return c > static_cast<int>(k) && c < static_cast<int>(size); };
      if (!leaf && (static_cast<std::size_t>(n.feature) >= m.n_features || !in_range(n.left) || !in_range(n.right)))
        corrupt("bad node");
      tree.nodes.push_back(n);
    }
    m.trees.push_back(std::move(tree));
  }
  std::string tail;
  if (!(in >> tail) || tail != "end") corrupt("missing end marker");
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

TuneResult tune(const Matrix& x, const std::vector<int>& y, const Params& base, std::uint64_t seed, double holdout) {
  check_shape(x, y);
  Rng rng(seed);
  std::vector<std::size_t> fit_rows, val_rows;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) rows.push_back(i);
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(rows.size()) * holdout));
    val_rows.insert(val_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_val));
    fit_rows.insert(fit_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_val), rows.end());
  }
  Matrix fx;
  std::vector<int> fy;
  for (auto i : fit_rows) {
    fx.push_back(x[i]);
    fy.push_back(y[i]);
  }

  TuneResult result;
  result.best = base;
  bool first = true;
  for (int trees : {100, 200, 400}) {
    for (int depth : {3, 4, 6}) {
      Params p = base;
      p.n_trees = trees;
      p.max_depth = depth;
      const Model m = train(fx, fy, p);
      std::size_t tp = 0, fp = 0, fn = 0;
      for (auto i : val_rows) {
        const int pred = m.classify(x[i]);
        tp += pred && y[i];
        fp += pred && !y[i];
        fn += !pred && y[i];
      }
      const double f1 = tp ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
      result.tried.emplace_back(p, f1);
      if (first || f1 > result.best_f1) {
        result.best = p;
        result.best_f1 = f1;
        first = false;
      }
    }
  }
  return result;
}

}  // namespace polyglot::gbdt
