// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "polyglot/codecs.hpp"
#include "polyglot/corpus.hpp"
#include "polyglot/error.hpp"
#include "polyglot/evaluate.hpp"
#include "polyglot/features.hpp"
#include "polyglot/forge.hpp"
#include "polyglot/gbdt.hpp"
#include "polyglot/magic.hpp"
#include "polyglot/rng.hpp"
#include "support.hpp"

using namespace polyglot;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr int kPairsPerRecipe = 50;
constexpr double kForgeSeconds = 120.0;
constexpr double kStackStrictRecallMax = 0.05;
constexpr double kParasiteStrictRecallMax = 0.30;
constexpr double kCavityScanRecallMin = 0.95;
constexpr double kReferenceF1 = 43.85;
constexpr double kReferenceF1Tolerance = 0.05;
constexpr double kModelFloor = 0.90;
constexpr double kPlainSlack = 0.01;
constexpr double kPipelineSeconds = 300.0;
constexpr double kLossSlack = 1e-9;
constexpr double kHistogramSumTolerance = 1e-9;
constexpr int kFuzzCases = 10000;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

bool is_archive(FileType t) { return t == FileType::ZIP || t == FileType::JAR; }

std::pair<FileArtifact, FileArtifact> donors(const forge::Recipe& r, std::uint64_t seed) {
  Rng rng(seed);
  const auto pick = [&](FileType t, std::size_t cap) {
    const std::size_t lo = std::max<std::size_t>(256, codecs::size_bounds(t).min);
    return codecs::generate_monoglot(t, rng.next(), rng.log_uniform(lo, std::max(lo, cap)));
  };
  if (r.method == Method::Cavity && r.host == FileType::PE) {
    auto guest = pick(r.guest, 64 * 1024);
    const std::size_t used = rng.log_uniform(256, 64 * 1024);
    FileArtifact host;
    host.bytes = codecs::build_pe(rng.next(), used, used + guest.bytes.size() + rng.below(512));
    host.declared_types = {FileType::PE};
    return {host, guest};
  }
  auto host = pick(r.host, 256 * 1024);
  return {host, pick(r.guest, r.method == Method::Cavity ? 30000 : 256 * 1024)};
}

void forge_matrix() {
  const auto start = Clock::now();
  std::size_t recipes = 0, complete = 0, forged = 0;
  std::string broken;
  for (const auto& r : forge::enumerate_recipes()) {
    ++recipes;
    int ok = 0;
    for (std::uint64_t attempt = 0; ok < kPairsPerRecipe && attempt < 4 * kPairsPerRecipe; ++attempt) {
      const auto [host, guest] = donors(r, derive_seed(0xACCE, attempt * 64 + recipes));
      try {
        const auto f = forge::forge(host, guest, r.method);
        const ByteView b = f.artifact.bytes;
        bool good = codecs::validate(b, r.host) && codecs::validate(b, r.guest) &&
                    forge::logical_content(b, r.guest) == forge::logical_content(guest.bytes, r.guest);
        if (good && is_archive(r.guest)) good = test::read_zip(b) == test::read_zip(guest.bytes);
        if (!good && broken.empty()) broken = " first failure " + forge::to_string(r);
        ok += good;
        ++forged;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::GuestTooLarge && e.code() != ErrorCode::UnsupportedSize) {
          if (broken.empty()) broken = std::string(" error ") + e.what();
          break;
        }
      }
    }
    complete += ok >= kPairsPerRecipe;
  }
  const double t = seconds_since(start);
  report(1, complete == recipes && recipes == 32 && broken.empty() && t < kForgeSeconds,
         std::to_string(complete) + "/" + std::to_string(recipes) + " recipes with " +
             std::to_string(kPairsPerRecipe) + " dual-valid pairs, " + std::to_string(forged) + " forged in " +
             std::to_string(t) + " s" + broken);
}

struct Pipeline {
  corpus::Manifest manifest;
  std::string digest;
  evaluate::EvalReport strict, scan, augmented, plain;
  gbdt::Model augmented_model;
  features::FeatureMatrix train_aug, test_aug;
  double seconds = 0;
};

features::FeatureMatrix featurize_split(const corpus::Manifest& m, corpus::Split s, features::Layout layout) {
  std::vector<features::Sample> samples;
  for (const auto& e : m.split(s)) samples.push_back({m.path_of(e), e.label});
  return features::featurize_batch(samples, layout);
}

evaluate::EvalReport model_report(const corpus::Manifest& m, const gbdt::Model& model, const std::string& path) {
  gbdt::save(model, path);
  const auto d = evaluate::DetectorSpec::parse("model:" + path);
  return evaluate::score(evaluate::run_detector(d, m), m, d.name());
}

Pipeline run_pipeline(const std::string& dir) {
  const auto start = Clock::now();
  Pipeline p;
  p.manifest = corpus::build_corpus(corpus::CorpusSpec::desk_default(), dir);
  p.digest = corpus::manifest_digest(p.manifest);
  const auto detect = [&](const std::string& name) {
    const auto d = evaluate::DetectorSpec::parse(name);
    return evaluate::score(evaluate::run_detector(d, p.manifest), p.manifest, d.name());
  };
  p.strict = detect("strict");
  p.scan = detect("scan");
  p.train_aug = featurize_split(p.manifest, corpus::Split::Train, features::Layout::Augmented);
  p.augmented_model = gbdt::train(p.train_aug.rows, p.train_aug.labels, {}, 2);
  p.augmented = model_report(p.manifest, p.augmented_model, dir + "/augmented.model");
  const auto train_plain = featurize_split(p.manifest, corpus::Split::Train, features::Layout::Plain);
  p.plain = model_report(p.manifest, gbdt::train(train_plain.rows, train_plain.labels, {}, 1), dir + "/plain.model");
  p.seconds = seconds_since(start);
  p.test_aug = featurize_split(p.manifest, corpus::Split::Test, features::Layout::Augmented);
  return p;
}

double recall(const evaluate::EvalReport& r, Method m) { return r.per_method.at(m).metrics.recall; }

void identifier_checks(const Pipeline& p) {
  std::size_t right = 0, total = 0;
  for (const auto& e : p.manifest.split(corpus::Split::Test)) {
    if (e.label != 0) continue;
    ++total;
    right += magic::identify_strict(read_file(p.manifest.path_of(e))).primary == e.types[0];
  }
  report(2, total > 0 && right == total,
         "strict identification " + std::to_string(right) + "/" + std::to_string(total) + " test monoglots");

  const double stack = recall(p.strict, Method::Stack), parasite = recall(p.strict, Method::Parasite);
  const double zipper = recall(p.scan, Method::Zipper), cavity = recall(p.scan, Method::Cavity);
  report(3,
         stack <= kStackStrictRecallMax && parasite <= kParasiteStrictRecallMax && zipper == 1.0 &&
             cavity >= kCavityScanRecallMin,
         "strict recall stack " + pct(stack) + " parasite " + pct(parasite) + "; scan recall zipper " + pct(zipper) +
             " cavity " + pct(cavity));
}

void reference_f1() {
  const double f1 = 100.0 * evaluate::f1_score(0.9961, 0.2811);
  char buf[64];
  std::snprintf(buf, sizeof buf, "F1(99.61%%, 28.11%%) = %.4f", f1);
  report(4, std::abs(f1 - kReferenceF1) <= kReferenceF1Tolerance, buf);
}

void model_checks(const Pipeline& p) {
  const auto& aug = p.augmented.overall.metrics;
  const auto& plain = p.plain.overall.metrics;
  report(5,
         aug.recall >= kModelFloor && aug.f1 >= kModelFloor && aug.recall >= plain.recall - kPlainSlack &&
             p.seconds < kPipelineSeconds,
         "augmented recall " + pct(aug.recall) + " F1 " + pct(aug.f1) + "; plain recall " + pct(plain.recall) +
             "; pipeline " + std::to_string(p.seconds) + " s");

  const auto& m = p.augmented_model;
  bool monotone = m.loss_history.size() == m.trees.size() + 1;
  for (std::size_t i = 1; i < m.loss_history.size(); ++i)
    monotone &= m.loss_history[i] <= m.loss_history[i - 1] + kLossSlack;
  // Test rows plus randomly perturbed copies.
  std::mt19937_64 g(6);
  std::vector<std::vector<double>> probes;
  for (std::size_t i = 0; probes.size() < 1000; ++i) {
    auto v = p.test_aug.rows[i % p.test_aug.rows.size()];
    if (i >= p.test_aug.rows.size())
      for (std::size_t k = 0; k < features::kHistogramWidth; ++k) v[k] += static_cast<double>(g() % 64);
    probes.push_back(std::move(v));
  }
  std::size_t equal = 0;
  for (const auto& v : probes) equal += m.predict_proba(v) == test::oracle_proba(m, v);
  test::TempDir dir;
  gbdt::save(m, dir.file("m.txt"));
  const auto back = gbdt::load(dir.file("m.txt"));
  std::size_t same = 0;
  for (std::size_t i = 0; i < 100; ++i) same += back.predict_proba(probes[i * 7]) == m.predict_proba(probes[i * 7]);
  report(6, monotone && equal == 1000 && same == 100,
         std::string("loss ") + (monotone ? "non-increasing" : "INCREASED") + "; oracle agreement " +
             std::to_string(equal) + "/1000; save/load " + std::to_string(same) + "/100");
}

void feature_checks() {
  std::mt19937_64 g(77);
  std::size_t conserved = 0, one_hot = 0;
  for (int i = 0; i < kFuzzCases; ++i) {
    const auto b = test::random_bytes(g, g() % 4096);
    const auto counts = features::byte_histogram(b).values;
    const auto freq = features::byte_histogram(b, true).values;
    double c = 0, f = 0;
    for (double v : counts) c += v;
    for (double v : freq) f += v;
    conserved += c == static_cast<double>(b.size()) &&
                 (b.empty() ? f == 0.0 : std::abs(f - 1.0) <= kHistogramSumTolerance);
    const auto aug = features::featurize(b, features::Layout::Augmented).values;
    double hot = 0;
    bool binary = true;
    for (std::size_t k = features::kHistogramWidth; k < aug.size(); ++k) {
      hot += aug[k];
      binary &= aug[k] == 0.0 || aug[k] == 1.0;
    }
    const auto slot = features::mime_slot(magic::identify_strict(b).primary);
    one_hot += binary && hot == 1.0 && aug[features::kHistogramWidth + slot] == 1.0;
  }
  report(7, conserved == kFuzzCases && one_hot == kFuzzCases,
         "histogram conservation " + std::to_string(conserved) + "/" + std::to_string(kFuzzCases) + "; one-hot " +
             std::to_string(one_hot) + "/" + std::to_string(kFuzzCases));
}

void reproducibility(const Pipeline& first) {
  test::TempDir dir;
  const auto again = run_pipeline(dir.path().string());
  const auto same = [](const evaluate::EvalReport& a, const evaluate::EvalReport& b) {
    return evaluate::emit_json(a) == evaluate::emit_json(b);
  };
  // Model detector names carry the model path, which differs between runs.
  auto strip = [](evaluate::EvalReport r) {
    r.detector.clear();
    return r;
  };
  const bool ok = first.digest == again.digest && same(first.strict, again.strict) && same(first.scan, again.scan) &&
                  same(strip(first.augmented), strip(again.augmented)) &&
                  same(strip(first.plain), strip(again.plain)) &&
                  gbdt::serialize(first.augmented_model) == gbdt::serialize(again.augmented_model);
  report(8, ok, "manifest digest " + first.digest.substr(0, 16) + (ok ? " and all reports" : "") +
                    (ok ? " reproduced" : " differs on rebuild"));
}

}  // namespace

int main() {
  try {
    forge_matrix();
    test::TempDir dir;
    const auto p = run_pipeline(dir.path().string());
    identifier_checks(p);
    reference_f1();
    model_checks(p);
    feature_checks();
    reproducibility(p);
  } catch (const std::exception& e) {
    std::printf("aborted: %s\n", e.what());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
