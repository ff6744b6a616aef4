#include "polyglot/magic.hpp"

#include <algorithm>

#include "polyglot/codecs.hpp"
#include "polyglot/zip.hpp"

namespace polyglot::magic {

using namespace std::string_view_literals;

const std::vector<SignatureRule>& signature_rules() {
  static const std::vector<SignatureRule> rules = {
      {FileType::PDF, 0, 1024 - 5, "%PDF-"},  // whole marker inside the first 1024 bytes
      {FileType::PNG, 0, 0, "\x89PNG\r\n\x1a\n"sv},
      {FileType::GIF, 0, 0, "GIF87a"},
      {FileType::GIF, 0, 0, "GIF89a"},
      {FileType::JPG, 0, 0, "\xFF\xD8\xFF"},
      {FileType::TIFF, 0, 0, "II*\0"sv},
      {FileType::TIFF, 0, 0, "MM\0*"sv},
      {FileType::ZIP, 0, 0, "PK\x03\x04"},
      {FileType::DCM, 128, 128, "DICM"},
      {FileType::ISO, 32769, 32769, "CD001"},
      {FileType::PE, 0, 0, "MZ"},
  };
  return rules;
}

namespace {

bool local_name_is_meta_inf(ByteView b, std::size_t at) {
  if (!fits(b, at, zip::kLocalHeaderSize)) return false;
  return starts_with_at(b, at + zip::kLocalHeaderSize, "META-INF/") && read_le16(b, at + 26) >= 9;
}

bool pe_header_present(ByteView b) {
  if (!fits(b, 0x3C, 4)) return false;
  const std::size_t nt = read_le32(b, 0x3C);
  return starts_with_at(b, nt, "PE\0\0"sv);
}

std::optional<Match> apply(const SignatureRule& rule, ByteView b) {
  std::size_t at = npos;
  if (rule.min_offset == rule.max_offset) {
    if (starts_with_at(b, rule.min_offset, rule.magic)) at = rule.min_offset;
  } else {
    const std::size_t end = std::min(b.size(), rule.max_offset + rule.magic.size());
    if (end > rule.min_offset) {
      const std::size_t hit = find(b.first(end), rule.magic, rule.min_offset);
      if (hit != npos) at = hit;
    }
  }
  if (at == npos) return std::nullopt;
  if (rule.type == FileType::PE && !pe_header_present(b)) return std::nullopt;
  if (rule.type == FileType::ZIP && local_name_is_meta_inf(b, at)) return Match{FileType::JAR, at};
  return Match{rule.type, at};
}

bool before(const Match& a, const Match& b) {
  if (a.offset != b.offset) return a.offset < b.offset;
  return a.type < b.type;
}

std::vector<Match> anchored(ByteView b) {
  std::vector<Match> out;
  for (const auto& rule : signature_rules())
    if (auto m = apply(rule, b)) out.push_back(*m);
  return out;
}

// Image signatures at non-zero offsets, kept only when a full parse of the
// bytes from that point succeeds.
constexpr std::pair<FileType, std::string_view> kEmbedded[] = {
    {FileType::PNG, "\x89PNG\r\n\x1a\n"sv}, {FileType::GIF, "GIF89a"},  {FileType::GIF, "GIF87a"},
    {FileType::JPG, "\xFF\xD8\xFF"},         {FileType::TIFF, "II*\0"sv}, {FileType::TIFF, "MM\0*"sv},
};

void embedded(ByteView b, std::vector<Match>& out) {
  for (const auto& [type, magic] : kEmbedded) {
    for (std::size_t at = find(b, magic, 1); at != npos; at = find(b, magic, at + 1)) {
      if (codecs::validate(b.subspan(at), type)) {
        out.push_back({type, at});
        break;
      }
    }
  }
}

IdReport finalize(std::vector<Match> matches, bool strict) {
  std::sort(matches.begin(), matches.end(), before);
  std::vector<Match> unique;
  for (const auto& m : matches) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Match& u) { return u.type == m.type; });
    if (!seen) unique.push_back(m);
  }
  // A JAR is also a ZIP; report the more specific type once.
  const bool jar = std::any_of(unique.begin(), unique.end(), [](const Match& m) { return m.type == FileType::JAR; });
  if (jar) std::erase_if(unique, [](const Match& m) { return m.type == FileType::ZIP; });

  IdReport r;
  if (!unique.empty()) r.primary = unique.front().type;
  if (strict && !unique.empty()) unique.resize(1);
  r.all_matches = std::move(unique);
  r.is_polyglot = !strict && r.all_matches.size() > 1;
  return r;
}

}  // namespace

IdReport identify_strict(ByteView bytes) { return finalize(anchored(bytes), true); }

IdReport identify_scan(ByteView bytes, const ScanOptions& options) {
  auto matches = anchored(bytes);
  if (options.trailing_zip_scan) {
    if (auto a = zip::parse(bytes, zip::kEocdSearchWindow)) {
      const auto type = a->has_entry(zip::kManifestName) ? FileType::JAR : FileType::ZIP;
      matches.push_back({type, a->start_offset()});
    }
  }
  embedded(bytes, matches);
  return finalize(std::move(matches), false);
}

std::string format_report(const IdReport& report) {
  std::string out;
  for (const auto& m : report.all_matches) {
    out += std::to_string(m.offset);
    out += '\t';
    out += name_of(m.type);
    out += '\t';
    out += mime_of(m.type);
    out += '\n';
  }
  if (report.all_matches.empty()) out += "-\tunknown\t" + report.mime() + "\n";
  return out;
}

}  // namespace polyglot::magic
