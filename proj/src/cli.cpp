#include "polyglot/cli.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "polyglot/codecs.hpp"
#include "polyglot/corpus.hpp"
#include "polyglot/error.hpp"
#include "polyglot/evaluate.hpp"
#include "polyglot/features.hpp"
#include "polyglot/forge.hpp"
#include "polyglot/gbdt.hpp"
#include "polyglot/linear.hpp"
#include "polyglot/magic.hpp"

namespace polyglot::cli {

namespace {

FileType file_type_arg(const std::string& s) {
  auto t = parse_file_type(s);
  if (!t) throw CLI::ValidationError("type", "unknown file type " + s);
  return *t;
}

FileArtifact load_donor(const std::string& path, const std::string& declared) {
  FileArtifact a;
  a.bytes = read_file(path);
  if (!declared.empty()) {
    a.declared_types = {file_type_arg(declared)};
  } else {
    const auto id = magic::identify_strict(a.bytes);
    if (!id.primary) throw Error(ErrorCode::InapplicableRecipe, path + ": type not recognized, pass it explicitly");
    a.declared_types = {*id.primary};
  }
  return a;
}

// Writes to --out when given, otherwise to the output stream.
void emit(std::ostream& out, const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  write_file(out_path, as_view(text));
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build, identify and classify polyglot files."};
  app.name("polyglot");
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 42;
  bool seed_given = false;
  bool quiet = false;
  std::string out_path;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](const std::uint64_t& s) {
        seed = s;
        seed_given = true;
      }, "Random seed (default 42)");
  app.add_flag("--quiet,-q", quiet, "Suppress progress messages");
  app.add_option("--out,-o", out_path, "Output file or directory");
  const auto note = [&](const std::string& msg) {
    if (!quiet) err << msg << "\n";
  };

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "Generate a labeled corpus and its manifest");
  std::string spec_path;
  gen->add_option("--spec", spec_path, "Corpus spec JSON (default: desk-scale spec)");
  gen->callback([&] {
    if (out_path.empty()) throw CLI::RequiredError("--out");
    corpus::CorpusSpec spec = corpus::CorpusSpec::desk_default();
    if (!spec_path.empty()) {
      const Bytes text = read_file(spec_path);
      spec = corpus::parse_spec(std::string(text.begin(), text.end()));
    }
    if (seed_given || spec_path.empty()) spec.seed = seed;
    const auto m = corpus::build_corpus(spec, out_path);
    note("wrote " + std::to_string(m.entries.size()) + " files and " + out_path + "/" + corpus::kManifestName);
    out << corpus::manifest_digest(m) << "\n";
  });

  // forge
  auto* fg = app.add_subcommand("forge", "Combine a host and a guest file into a polyglot");
  std::string method_name, host_path, guest_path, host_type, guest_type;
  fg->add_option("--method", method_name, "stack, parasite, zipper or cavity")->required();
  fg->add_option("--host", host_path, "Host file")->required()->check(CLI::ExistingFile);
  fg->add_option("--guest", guest_path, "Guest file")->required()->check(CLI::ExistingFile);
  fg->add_option("--host-type", host_type, "Host type (default: identified)");
  fg->add_option("--guest-type", guest_type, "Guest type (default: identified)");
  fg->callback([&] {
    if (out_path.empty()) throw CLI::RequiredError("--out");
    const auto method = parse_method(method_name);
    if (!method) throw CLI::ValidationError("--method", "unknown method " + method_name);
    const auto f = forge::forge(load_donor(host_path, host_type), load_donor(guest_path, guest_type), *method);
    write_file(out_path, f.artifact.bytes);
    for (const auto& x : f.fixups)
      out << x.position << "\t" << x.width << "\t" << x.delta << "\t" << x.description << "\n";
  });

  // identify
  auto* id = app.add_subcommand("identify", "Print signature matches as <offset>\\t<type>\\t<mime>");
  std::vector<std::string> id_files;
  bool scan = false, no_trailing = false;
  id->add_option("files", id_files, "Files to identify")->required()->check(CLI::ExistingFile);
  id->add_flag("--scan", scan, "Report every embedded format, not only the first");
  id->add_flag("--no-trailing-zip", no_trailing, "In scan mode, skip the end-of-file archive search");
  id->callback([&] {
    std::string text;
    for (const auto& f : id_files) {
      const Bytes b = read_file(f);
      const auto r = scan ? magic::identify_scan(b, {.trailing_zip_scan = !no_trailing}) : magic::identify_strict(b);
      const auto lines = magic::format_report(r);
      if (id_files.size() == 1) {
        text += lines;
        continue;
      }
      std::istringstream in(lines);
      for (std::string line; std::getline(in, line);) text += f + "\t" + line + "\n";
    }
    emit(out, out_path, text);
  });

  // features
  auto* ft = app.add_subcommand("features", "Write the feature matrix for a manifest");
  std::string manifest_path, layout_name = "augmented", split_name = "all";
  bool normalize = false;
  ft->add_option("--manifest", manifest_path, "Corpus manifest")->required()->check(CLI::ExistingFile);
  ft->add_option("--layout", layout_name, "plain (256 byte counts) or augmented (plus type one-hot)")
      ->check(CLI::IsMember({"plain", "augmented"}));
  ft->add_option("--split", split_name, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
  ft->add_flag("--normalize", normalize, "Divide counts by file length");
  ft->callback([&] {
    if (out_path.empty()) throw CLI::RequiredError("--out");
    const auto m = corpus::read_manifest(manifest_path);
    std::vector<features::Sample> samples;
    for (const auto& e : m.entries)
      if (split_name == "all" || corpus::name_of(e.split) == split_name) samples.push_back({m.path_of(e), e.label});
    const auto layout = layout_name == "plain" ? features::Layout::Plain : features::Layout::Augmented;
    const auto matrix = features::featurize_batch(samples, layout, normalize);
    features::write_matrix(matrix, out_path);
    note("wrote " + std::to_string(matrix.rows.size()) + " rows of width " + std::to_string(matrix.width()));
  });

  // train
  auto* tr = app.add_subcommand("train", "Train a classifier on a feature matrix");
  std::string features_path, model_path, kind = "gbdt";
  gbdt::Params gp;
  linear::Params lp;
  bool tune = false;
  tr->add_option("--features", features_path, "Feature matrix CSV")->required()->check(CLI::ExistingFile);
  tr->add_option("--model", model_path, "Model file to write")->required();
  tr->add_option("--model-kind", kind, "gbdt or linear")->check(CLI::IsMember({"gbdt", "linear"}));
  tr->add_option("--trees", gp.n_trees, "Boosting rounds")->check(CLI::NonNegativeNumber);
  tr->add_option("--depth", gp.max_depth, "Maximum tree depth")->check(CLI::PositiveNumber);
  tr->add_option("--learning-rate", gp.learning_rate, "Shrinkage per tree")->check(CLI::PositiveNumber);
  tr->add_option("--min-leaf", gp.min_samples_leaf, "Minimum samples per leaf")->check(CLI::PositiveNumber);
  tr->add_option("--positive-weight", gp.positive_weight, "Weight of polyglot samples")->check(CLI::PositiveNumber);
  tr->add_flag("--tune", tune, "Pick tree count and depth by hold-out F1 first");
  tr->add_option("--epochs", lp.epochs, "Gradient steps for the linear model")->check(CLI::NonNegativeNumber);
  tr->add_option("--l2", lp.l2, "L2 penalty for the linear model")->check(CLI::NonNegativeNumber);
  tr->callback([&] {
    const auto m = features::read_matrix(features_path);
    const int layout = static_cast<int>(m.layout);
    if (kind == "linear") {
      const auto model = linear::train(m.rows, m.labels, lp, layout);
      linear::save(model, model_path);
      note("final loss " + fixed(model.loss_history.back(), 6));
      return;
    }
    if (tune) {
      const auto t = gbdt::tune(m.rows, m.labels, gp, seed);
      note("tuned: " + std::to_string(t.best.n_trees) + " trees, depth " + std::to_string(t.best.max_depth) +
           ", hold-out F1 " + fixed(t.best_f1, 4));
      gp = t.best;
    }
    const auto model = gbdt::train(m.rows, m.labels, gp, layout);
    gbdt::save(model, model_path);
    note("final loss " + fixed(model.loss_history.back(), 6));
  });

  // predict
  auto* pr = app.add_subcommand("predict", "Score files with a trained model");
  std::string predict_model;
  std::vector<std::string> predict_files;
  double threshold = 0.5;
  pr->add_option("--model", predict_model, "Model file")->required()->check(CLI::ExistingFile);
  pr->add_option("--threshold", threshold, "Probability at or above which a file is flagged");
  pr->add_option("files", predict_files, "Files to score")->required()->check(CLI::ExistingFile);
  pr->callback([&] {
    const auto model = evaluate::load_model(predict_model);
    if (model.width() != features::width_of(model.layout()))
      throw Error(ErrorCode::ModelLayoutMismatch, "model width does not match its layout");
    std::string text;
    for (const auto& f : predict_files) {
      const double p = model.predict_proba(features::featurize(read_file(f), model.layout()).values);
      text += f + "\t" + fixed(p, 6) + "\t" + (p >= threshold ? "1" : "0") + "\n";
    }
    emit(out, out_path, text);
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Score a detector on a manifest's test split");
  std::string detector = "strict", format = "text", eval_manifest;
  ev->add_option("--detector", detector, "strict, scan or model:<path>[@threshold]");
  ev->add_option("--manifest", eval_manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  ev->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  ev->callback([&] {
    const auto m = corpus::read_manifest(eval_manifest);
    const auto d = evaluate::DetectorSpec::parse(detector);
    const auto report = evaluate::score(evaluate::run_detector(d, m), m, d.name());
    emit(out, out_path, format == "json" ? evaluate::emit_json(report) : evaluate::emit_text(report));
  });

  // summarize
  auto* sm = app.add_subcommand("summarize", "Count manifest entries by label, types, method and split");
  std::string summary_manifest;
  bool verify = false;
  sm->add_option("--manifest", summary_manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  sm->add_flag("--verify", verify, "Also re-check digests and validity of every file");
  sm->callback([&] {
    const auto m = corpus::read_manifest(summary_manifest);
    emit(out, out_path, corpus::format_summary(corpus::summarize(m)));
    if (verify) {
      const auto problems = corpus::verify(m);
      for (const auto& p : problems) err << p << "\n";
      if (!problems.empty())
        throw Error(ErrorCode::InvalidArgument, std::to_string(problems.size()) + " files failed verification");
    }
  });

  // generate
  auto* gn = app.add_subcommand("generate", "Write one synthetic single-format file");
  std::string gen_type;
  std::size_t gen_size = 4096;
  gn->add_option("--type", gen_type, "File type")->required();
  gn->add_option("--size", gen_size, "Approximate size in bytes");
  gn->callback([&] {
    if (out_path.empty()) throw CLI::RequiredError("--out");
    write_file(out_path, codecs::generate_monoglot(file_type_arg(gen_type), seed, gen_size).bytes);
  });

  // validate
  auto* va = app.add_subcommand("validate", "Check a file against one or more formats");
  std::vector<std::string> va_types;
  std::string va_file;
  va->add_option("--type", va_types, "Format to check (repeatable)")->required();
  va->add_option("file", va_file, "File")->required()->check(CLI::ExistingFile);
  va->callback([&] {
    const Bytes b = read_file(va_file);
    bool all = true;
    for (const auto& t : va_types) {
      const bool ok = codecs::validate(b, file_type_arg(t));
      all &= ok;
      out << t << "\t" << (ok ? "valid" : "invalid") << "\n";
    }
    if (!all) throw Error(ErrorCode::InvalidArgument, va_file + " failed validation");
  });

  // recipes
  auto* rc = app.add_subcommand("recipes", "List applicable host/guest/method combinations");
  bool corpus_only = false;
  rc->add_flag("--corpus", corpus_only, "Only the combinations used by the default corpus");
  rc->callback([&] {
    for (const auto& r : corpus_only ? forge::default_corpus_recipes() : forge::enumerate_recipes())
      out << name_of(r.method) << "\t" << name_of(r.host) << "\t" << name_of(r.guest) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto used = app.get_subcommands();
    out << (used.empty() ? app.help() : used.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    if (e.get_exit_code() == 0) return 0;
    err << "run with --help for usage\n";
    return 1;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace polyglot::cli
