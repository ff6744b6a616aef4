#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyglot/file_type.hpp"
#include "polyglot/forge.hpp"

namespace polyglot::corpus {

struct RecipeCount {
  forge::Recipe recipe;
  std::size_t count = 0;
};

struct CorpusSpec {
  std::map<FileType, std::size_t> monoglots;
  std::vector<RecipeCount> polyglots;
  double split_fraction = 0.8;
  std::uint64_t seed = 42;
  /// Donor payload sizes are drawn log-uniformly from this range, raised to
  /// each type's minimum where needed.
  std::size_t min_size = 256;
  std::size_t max_size = 256 * 1024;

  /// 140 files per type and 100 per recipe of forge::default_corpus_recipes().
  static CorpusSpec desk_default();
  /// Throws InvalidArgument on bad counts or fractions.
  void check() const;
};

/// Accepts {"seed", "split_fraction", "min_size", "max_size", "monoglot",
/// "per_recipe", "recipes"}. "monoglot" is a count for every type or an
/// object keyed by type name; "recipes" is "default", "all" or a list of
/// {"host", "guest", "method", "count"}. Missing keys take desk defaults.
CorpusSpec parse_spec(const std::string& json_text);
std::string spec_to_json(const CorpusSpec& spec);

enum class Split { Train, Test };
std::string_view name_of(Split s);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  int label = 0;     // 1 iff two types
  std::vector<FileType> types;
  std::optional<Method> method;
  Split split = Split::Train;
  std::string digest;  // SHA-256 of the file, hex
  std::size_t size = 0;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::string root;  // directory the entry paths are relative to
  std::vector<ManifestEntry> entries;

  std::string path_of(const ManifestEntry& e) const;
  std::vector<ManifestEntry> split(Split s) const;
};

inline constexpr const char* kManifestName = "manifest.txt";

/// Writes every file under `out_dir` plus `out_dir`/manifest.txt.
Manifest build_corpus(const CorpusSpec& spec, const std::string& out_dir);

/// One JSON object per line, keys in the order path, label, types, method,
/// split, digest, size.
std::string serialize_manifest(const Manifest& m);
Manifest parse_manifest(const std::string& text, const std::string& root);
void write_manifest(const Manifest& m, const std::string& path);
Manifest read_manifest(const std::string& path);
/// SHA-256 of the serialized manifest.
std::string manifest_digest(const Manifest& m);

/// Problems found re-reading the files: digest mismatches, missing files and
/// files that no longer validate as their declared types. Empty when clean.
std::vector<std::string> verify(const Manifest& m);

struct SummaryRow {
  int label = 0;
  std::string combo;  // "PDF" or "PDF+ZIP"
  std::string method;  // "-" for monoglots
  std::string split;
  std::size_t count = 0;
};

/// Counts grouped by (label, types, method, split), in a stable order.
std::vector<SummaryRow> summarize(const Manifest& m);
std::string format_summary(const std::vector<SummaryRow>& rows);

}  // namespace polyglot::corpus
