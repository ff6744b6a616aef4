#include "polyglot/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polyglot/codecs.hpp"
#include "polyglot/digest.hpp"
#include "polyglot/error.hpp"
#include "polyglot/rng.hpp"

namespace polyglot::corpus {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

CorpusSpec CorpusSpec::desk_default() {
  CorpusSpec s;
  for (FileType t : kAllFileTypes) s.monoglots[t] = 140;
  for (const auto& r : forge::default_corpus_recipes()) s.polyglots.push_back({r, 100});
  return s;
}

void CorpusSpec::check() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "split_fraction must be in (0, 1)");
  if (min_size == 0 || min_size > max_size) throw Error(ErrorCode::InvalidArgument, "bad size range");
  for (const auto& rc : polyglots)
    if (!forge::is_applicable(rc.recipe)) throw Error(ErrorCode::InapplicableRecipe, forge::to_string(rc.recipe));
}

namespace {

[[noreturn]] void bad_spec(const std::string& why) { throw Error(ErrorCode::InvalidArgument, "corpus spec: " + why); }

FileType type_named(const std::string& s) {
  auto t = parse_file_type(s);
  if (!t) bad_spec("unknown type " + s);
  return *t;
}

std::size_t count_from(const nlohmann::json& v) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad_spec("counts must be non-negative integers");
  return v.get<std::size_t>();
}

}  // namespace

CorpusSpec parse_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    bad_spec(e.what());
  }
  if (!j.is_object()) bad_spec("expected an object");
  CorpusSpec s = CorpusSpec::desk_default();
  try {
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("split_fraction")) s.split_fraction = j["split_fraction"].get<double>();
    if (j.contains("min_size")) s.min_size = j["min_size"].get<std::size_t>();
    if (j.contains("max_size")) s.max_size = j["max_size"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    bad_spec(e.what());
  }
  if (j.contains("monoglot")) {
    const auto& m = j["monoglot"];
    if (m.is_object()) {
      s.monoglots.clear();
      for (const auto& [k, v] : m.items()) s.monoglots[type_named(k)] = count_from(v);
    } else {
      const std::size_t n = count_from(m);
      for (auto& [t, c] : s.monoglots) c = n;
    }
  }
  const std::size_t per_recipe = j.contains("per_recipe") ? count_from(j["per_recipe"]) : 100;
  std::vector<forge::Recipe> list = forge::default_corpus_recipes();
  if (j.contains("recipes") && j["recipes"].is_string()) {
    const auto which = j["recipes"].get<std::string>();
    if (which == "all") list = forge::enumerate_recipes();
    else if (which != "default") bad_spec("recipes must be \"default\", \"all\" or a list");
  }
  s.polyglots.clear();
  if (j.contains("recipes") && j["recipes"].is_array()) {
    for (const auto& r : j["recipes"]) {
      if (!r.is_object() || !r.contains("host") || !r.contains("guest") || !r.contains("method"))
        bad_spec("recipe needs host, guest and method");
      const auto method = parse_method(r["method"].get<std::string>());
      if (!method) bad_spec("unknown method");
      const forge::Recipe recipe{type_named(r["host"].get<std::string>()), type_named(r["guest"].get<std::string>()),
                                 *method};
      s.polyglots.push_back({recipe, r.contains("count") ? count_from(r["count"]) : per_recipe});
    }
  } else {
    for (const auto& r : list) s.polyglots.push_back({r, per_recipe});
  }
  s.check();
  return s;
}

std::string spec_to_json(const CorpusSpec& spec) {
  ordered_json j;
  j["seed"] = spec.seed;
  j["split_fraction"] = spec.split_fraction;
  j["min_size"] = spec.min_size;
  j["max_size"] = spec.max_size;
  ordered_json mono = ordered_json::object();
  for (const auto& [t, c] : spec.monoglots) mono[std::string(name_of(t))] = c;
  j["monoglot"] = mono;
  ordered_json recipes = ordered_json::array();
  for (const auto& rc : spec.polyglots)
    recipes.push_back({{"host", name_of(rc.recipe.host)},
                       {"guest", name_of(rc.recipe.guest)},
                       {"method", name_of(rc.recipe.method)},
                       {"count", rc.count}});
  j["recipes"] = recipes;
  return j.dump(2) + "\n";
}

std::string_view name_of(Split s) { return s == Split::Train ? "train" : "test"; }

std::string Manifest::path_of(const ManifestEntry& e) const { return (fs::path(root) / e.path).string(); }

std::vector<ManifestEntry> Manifest::split(Split s) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries)
    if (e.split == s) out.push_back(e);
  return out;
}

namespace {

std::size_t draw_size(Rng& rng, FileType t, const CorpusSpec& spec, std::size_t cap = codecs::kUnlimited) {
  const auto b = codecs::size_bounds(t);
  const std::size_t lo = std::max(spec.min_size, b.min);
  const std::size_t hi = std::max(lo, std::min({spec.max_size, b.max, cap}));
  return rng.log_uniform(lo, hi);
}

std::size_t align_up(std::size_t n, std::size_t a) { return (n + a - 1) / a * a; }

// Donor sizes are drawn per attempt; combinations that do not fit (a guest
// larger than every cavity, a header larger than one comment block) are
// redrawn with the next attempt seed.
forge::Forged make_polyglot(const forge::Recipe& r, std::uint64_t seed, const CorpusSpec& spec) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    try {
      FileArtifact host, guest;
      if (r.method == Method::Cavity && r.host == FileType::PE) {
        guest = codecs::generate_monoglot(r.guest, rng.next(), draw_size(rng, r.guest, spec, 64 * 1024));
        const std::size_t used = rng.log_uniform(256, 64 * 1024);
        const std::size_t raw = align_up(used + guest.bytes.size() + rng.below(codecs::kPeFileAlignment),
                                         codecs::kPeFileAlignment);
        host.bytes = codecs::build_pe(rng.next(), used, raw);
        host.declared_types = {FileType::PE};
        host.seed = seed;
      } else {
        const std::size_t cap = r.method == Method::Cavity ? 30000 : codecs::kUnlimited;
        host = codecs::generate_monoglot(r.host, rng.next(), draw_size(rng, r.host, spec));
        guest = codecs::generate_monoglot(r.guest, rng.next(), draw_size(rng, r.guest, spec, cap));
      }
      auto f = forge::forge(host, guest, r.method);
      if (!codecs::validate(f.artifact.bytes, r.host) || !codecs::validate(f.artifact.bytes, r.guest))
        throw Error(ErrorCode::InvalidArgument, "forged " + forge::to_string(r) + " failed validation");
      return f;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GuestTooLarge && e.code() != ErrorCode::UnsupportedSize) throw;
    }
  }
  throw Error(ErrorCode::GuestTooLarge, "no donor pair fits " + forge::to_string(r));
}

std::string numbered(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", i);
  return buf;
}

std::string cell_key(const ManifestEntry& e) {
  std::string k;
  for (FileType t : e.types) k += std::string(polyglot::name_of(t)) + "+";
  return k + (e.method ? std::string(polyglot::name_of(*e.method)) : "-");
}

std::uint64_t key_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

}  // namespace

Manifest build_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  spec.check();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, out_dir + ": " + ec.message());

  Manifest m;
  m.root = out_dir;
  const auto store = [&](const FileArtifact& a, const std::string& rel) {
    const fs::path full = fs::path(out_dir) / rel;
    fs::create_directories(full.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, full.parent_path().string() + ": " + ec.message());
    write_file(full.string(), a.bytes);
    ManifestEntry e;
    e.path = rel;
    e.types = a.declared_types;
    e.label = a.is_polyglot() ? 1 : 0;
    e.method = a.method;
    e.digest = sha256_hex(a.bytes);
    e.size = a.bytes.size();
    m.entries.push_back(std::move(e));
  };

  for (const auto& [type, count] : spec.monoglots) {
    const std::uint64_t stream = derive_seed(spec.seed, 0x100 + static_cast<std::uint64_t>(type));
    for (std::size_t i = 0; i < count; ++i) {
      Rng rng(derive_seed(stream, i));
      const std::size_t size = draw_size(rng, type, spec);
      const auto a = codecs::generate_monoglot(type, rng.next(), size);
      store(a, "mono/" + std::string(polyglot::name_of(type)) + "/" + numbered(i) + "." +
                   std::string(extension_of(type)));
    }
  }
  for (const auto& rc : spec.polyglots) {
    const auto& r = rc.recipe;
    const std::string tag = std::string(polyglot::name_of(r.host)) + "+" + std::string(polyglot::name_of(r.guest));
    const std::uint64_t stream = derive_seed(spec.seed, key_hash(forge::to_string(r)));
    for (std::size_t i = 0; i < rc.count; ++i) {
      const auto f = make_polyglot(r, derive_seed(stream, i), spec);
      store(f.artifact, "poly/" + std::string(polyglot::name_of(r.method)) + "/" + tag + "/" + numbered(i) + "." +
                            std::string(extension_of(r.host)));
    }
  }

  // Stratified split: each (types, method) cell is shuffled on its own
  // stream and its first round(n * fraction) members go to training.
  std::map<std::string, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < m.entries.size(); ++i) cells[cell_key(m.entries[i])].push_back(i);
  for (auto& [key, members] : cells) {
    Rng rng(derive_seed(spec.seed, key_hash("split:" + key)));
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * spec.split_fraction));
    for (std::size_t k = 0; k < members.size(); ++k)
      m.entries[members[k]].split = k < n_train ? Split::Train : Split::Test;
  }

  write_manifest(m, (fs::path(out_dir) / kManifestName).string());
  return m;
}

std::string serialize_manifest(const Manifest& m) {
  std::string out;
  for (const auto& e : m.entries) {
    ordered_json j;
    j["path"] = e.path;
    j["label"] = e.label;
    ordered_json types = ordered_json::array();
    for (FileType t : e.types) types.push_back(polyglot::name_of(t));
    j["types"] = types;
    j["method"] = e.method ? ordered_json(polyglot::name_of(*e.method)) : ordered_json(nullptr);
    j["split"] = name_of(e.split);
    j["digest"] = e.digest;
    j["size"] = e.size;
    out += j.dump();
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(const std::string& text, const std::string& root) {
  Manifest m;
  m.root = root;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = "manifest line " + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.path = j.at("path").get<std::string>();
      if (!j.contains("label") || j["label"].is_null()) throw Error(ErrorCode::MissingLabel, where);
      e.label = j["label"].get<int>();
      for (const auto& t : j.at("types")) e.types.push_back(type_named(t.get<std::string>()));
      if (!j.at("method").is_null()) {
        e.method = parse_method(j["method"].get<std::string>());
        if (!e.method) throw Error(ErrorCode::InvalidArgument, where + ": unknown method");
      }
      const auto split = j.at("split").get<std::string>();
      if (split != "train" && split != "test") throw Error(ErrorCode::InvalidArgument, where + ": bad split");
      e.split = split == "train" ? Split::Train : Split::Test;
      e.digest = j.at("digest").get<std::string>();
      e.size = j.at("size").get<std::size_t>();
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::InvalidArgument, where + ": " + ex.what());
    }
  }
  return m;
}

void write_manifest(const Manifest& m, const std::string& path) {
  const auto text = serialize_manifest(m);
  write_file(path, as_view(text));
}

Manifest read_manifest(const std::string& path) {
  const Bytes b = read_file(path);
  return parse_manifest(std::string(b.begin(), b.end()), fs::path(path).parent_path().string());
}

std::string manifest_digest(const Manifest& m) { return sha256_hex(as_view(serialize_manifest(m))); }

std::vector<std::string> verify(const Manifest& m) {
  std::vector<std::string> problems;
  for (const auto& e : m.entries) {
    Bytes b;
    try {
      b = read_file(m.path_of(e));
    } catch (const Error&) {
      problems.push_back(e.path + ": unreadable");
      continue;
    }
    if (sha256_hex(b) != e.digest) problems.push_back(e.path + ": digest mismatch");
    for (FileType t : e.types)
      if (!codecs::validate(b, t)) problems.push_back(e.path + ": not a valid " + std::string(polyglot::name_of(t)));
  }
  return problems;
}

std::vector<SummaryRow> summarize(const Manifest& m) {
  std::map<std::tuple<int, std::string, std::string, std::string>, std::size_t> counts;
  for (const auto& e : m.entries) {
    std::string combo;
    for (FileType t : e.types) combo += (combo.empty() ? "" : "+") + std::string(polyglot::name_of(t));
    const std::string method = e.method ? std::string(polyglot::name_of(*e.method)) : "-";
    ++counts[{e.label, combo, method, std::string(name_of(e.split))}];
  }
  std::vector<SummaryRow> rows;
  for (const auto& [k, n] : counts)
    rows.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), n});
  return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::string out = "label\tcombo\tmethod\tsplit\tcount\n";
  for (const auto& r : rows)
    out += std::to_string(r.label) + "\t" + r.combo + "\t" + r.method + "\t" + r.split + "\t" + std::to_string(r.count) + "\n";
  return out;
}

}  // namespace polyglot::corpus
