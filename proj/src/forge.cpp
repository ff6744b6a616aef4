#include "polyglot/forge.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "polyglot/codecs.hpp"
#include "polyglot/error.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/zip.hpp"
#include "forge_detail.hpp"

namespace polyglot::forge {

using detail::fail;

std::string to_string(const Recipe& r) {
  return std::string(name_of(r.host)) + "+" + std::string(name_of(r.guest)) + "/" + std::string(name_of(r.method));
}

namespace {

bool is_archive(FileType t) { return t == FileType::ZIP || t == FileType::JAR; }

constexpr FileType kStackHosts[] = {FileType::PDF, FileType::PNG, FileType::GIF, FileType::JPG,
                                    FileType::TIFF, FileType::DCM, FileType::PE};
constexpr FileType kParasiteHosts[] = {FileType::PDF, FileType::PNG, FileType::GIF, FileType::JPG};
constexpr FileType kIsoCavityGuests[] = {FileType::PDF, FileType::PNG, FileType::GIF,
                                         FileType::JPG, FileType::ZIP, FileType::JAR};

bool contains(std::span<const FileType> set, FileType t) { return std::find(set.begin(), set.end(), t) != set.end(); }

}  // namespace

bool is_applicable(const Recipe& r) {
  switch (r.method) {
    case Method::Stack: return contains(kStackHosts, r.host) && is_archive(r.guest);
    case Method::Parasite: return contains(kParasiteHosts, r.host) && is_archive(r.guest);
    case Method::Zipper: return r.host == FileType::DCM && (r.guest == FileType::GIF || r.guest == FileType::PDF);
    case Method::Cavity:
      if (r.host == FileType::ISO) return contains(kIsoCavityGuests, r.guest);
      // PE section padding sits after the headers, so only archives located
      // from the end of file can live there.
      return r.host == FileType::PE && is_archive(r.guest);
  }
  return false;
}

std::vector<Recipe> enumerate_recipes() {
  std::vector<Recipe> out;
  for (Method m : kAllMethods)
    for (FileType h : kAllFileTypes)
      for (FileType g : kAllFileTypes)
        if (is_applicable({h, g, m})) out.push_back({h, g, m});
  return out;
}

std::vector<Recipe> default_corpus_recipes() {
  using F = FileType;
  using M = Method;
  return {
      {F::PDF, F::ZIP, M::Stack},     {F::PNG, F::ZIP, M::Stack},     {F::GIF, F::ZIP, M::Stack},
      {F::JPG, F::JAR, M::Stack},     {F::TIFF, F::ZIP, M::Stack},    {F::TIFF, F::JAR, M::Stack},
      {F::DCM, F::ZIP, M::Stack},     {F::DCM, F::JAR, M::Stack},     {F::PE, F::JAR, M::Stack},
      {F::PDF, F::JAR, M::Parasite},  {F::PNG, F::ZIP, M::Parasite},  {F::PNG, F::JAR, M::Parasite},
      {F::GIF, F::ZIP, M::Parasite},  {F::GIF, F::JAR, M::Parasite},  {F::JPG, F::ZIP, M::Parasite},
      {F::JPG, F::JAR, M::Parasite},  {F::DCM, F::PDF, M::Zipper},    {F::DCM, F::GIF, M::Zipper},
      {F::ISO, F::PNG, M::Cavity},    {F::ISO, F::GIF, M::Cavity},    {F::PE, F::ZIP, M::Cavity},
  };
}

namespace detail {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

zip::Archive archive_of(const FileArtifact& guest) {
  auto a = zip::parse(guest.bytes);
  if (!a) fail(ErrorCode::InapplicableRecipe, "guest is not a readable archive");
  return *a;
}

void patch_offset(Bytes& out, std::size_t position, std::int64_t original, std::int64_t updated,
                  std::string description, std::vector<OffsetFixup>& fixups) {
  if (updated < 0 || updated > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::FixupOverflow, description + " does not fit in 32 bits");
  write_le32(out, position, static_cast<std::uint32_t>(updated));
  if (updated != original) fixups.push_back({position, 4, updated - original, std::move(description)});
}

void shift_archive(Bytes& out, std::size_t placed_at, const zip::Archive& a, std::int64_t delta,
                   std::vector<OffsetFixup>& fixups) {
  for (const auto& r : a.entries)
    patch_offset(out, placed_at + r.local_offset_field, r.local_offset, r.local_offset + delta,
                 "central record offset of " + r.name, fixups);
  patch_offset(out, placed_at + a.cd_offset_field, static_cast<std::int64_t>(a.cd_offset),
               static_cast<std::int64_t>(a.cd_offset) + delta, "central directory offset", fixups);
}

void record_xref(const pdf::Document& before, const pdf::Writer& w, std::size_t written_at,
                 std::vector<OffsetFixup>& fixups) {
  std::map<int, std::size_t> old;
  for (const auto& o : before.objects) old[o.number] = o.offset;
  std::map<int, std::size_t> now(w.offsets().begin(), w.offsets().end());
  for (const auto& [number, field] : w.xref_fields()) {
    auto it = old.find(number);
    if (it == old.end()) continue;
    const auto delta = static_cast<std::int64_t>(now.at(number)) - static_cast<std::int64_t>(it->second);
    if (delta != 0)
      fixups.push_back({written_at + field, 10, delta, "xref entry for object " + std::to_string(number)});
  }
}

}  // namespace detail

namespace {

void require_monoglot(const FileArtifact& a, const char* role) {
  if (a.declared_types.size() != 1)
    fail(ErrorCode::InapplicableRecipe, std::string(role) + " must be a single-format file");
}

Recipe recipe_of(const FileArtifact& host, const FileArtifact& guest, Method m) {
  require_monoglot(host, "host");
  require_monoglot(guest, "guest");
  Recipe r{host.primary_type(), guest.primary_type(), m};
  if (!is_applicable(r)) fail(ErrorCode::InapplicableRecipe, to_string(r));
  return r;
}

Forged finish(Bytes bytes, const Recipe& r, const FileArtifact& host, const FileArtifact& guest,
              std::vector<OffsetFixup> fixups) {
  Forged f;
  f.artifact.bytes = std::move(bytes);
  f.artifact.declared_types = {r.host, r.guest};
  f.artifact.method = r.method;
  f.artifact.seed = host.seed ^ (guest.seed << 1);
  std::sort(fixups.begin(), fixups.end(), [](const auto& a, const auto& b) { return a.position < b.position; });
  f.fixups = std::move(fixups);
  return f;
}

}  // namespace

Forged stack(const FileArtifact& host, const FileArtifact& guest) {
  const Recipe r = recipe_of(host, guest, Method::Stack);
  const auto a = detail::archive_of(guest);
  Bytes out = host.bytes;
  const std::size_t at = out.size();
  append(out, guest.bytes);
  std::vector<OffsetFixup> fixups;
  detail::shift_archive(out, at, a, static_cast<std::int64_t>(at), fixups);
  return finish(std::move(out), r, host, guest, std::move(fixups));
}

Forged cavity(const FileArtifact& host, const FileArtifact& guest) {
  const Recipe r = recipe_of(host, guest, Method::Cavity);
  const auto spans = codecs::locate_cavities(host.bytes, r.host);
  // Formats identified by a signature at offset 0 only work from a cavity
  // that starts at the beginning of the host.
  const bool at_zero = !is_archive(r.guest);
  std::optional<std::size_t> place;
  for (const auto& s : spans) {
    if (s.length < guest.bytes.size()) continue;
    if (at_zero && s.offset != 0) continue;
    place = s.offset;
    break;
  }
  if (!place) fail(ErrorCode::GuestTooLarge, "no cavity holds " + std::to_string(guest.bytes.size()) + " bytes");
  Bytes out = host.bytes;
  std::copy(guest.bytes.begin(), guest.bytes.end(), out.begin() + static_cast<std::ptrdiff_t>(*place));
  std::vector<OffsetFixup> fixups;
  if (is_archive(r.guest))
    detail::shift_archive(out, *place, detail::archive_of(guest), static_cast<std::int64_t>(*place), fixups);
  return finish(std::move(out), r, host, guest, std::move(fixups));
}

Forged parasite(const FileArtifact& host, const FileArtifact& guest) {
  const Recipe r = recipe_of(host, guest, Method::Parasite);
  std::vector<OffsetFixup> fixups;
  Bytes out;
  switch (r.host) {
    case FileType::PNG: out = detail::parasite_png(host, guest, fixups); break;
    case FileType::GIF: out = detail::parasite_gif(host, guest, fixups); break;
    case FileType::JPG: out = detail::parasite_jpg(host, guest, fixups); break;
    case FileType::PDF: out = detail::parasite_pdf(host, guest, fixups); break;
    default: fail(ErrorCode::InapplicableRecipe, to_string(r));
  }
  return finish(std::move(out), r, host, guest, std::move(fixups));
}

Forged zipper(const FileArtifact& host, const FileArtifact& guest) {
  const Recipe r = recipe_of(host, guest, Method::Zipper);
  std::vector<OffsetFixup> fixups;
  Bytes out = r.guest == FileType::GIF ? detail::zipper_dicom_gif(host, guest, fixups)
                                       : detail::zipper_dicom_pdf(host, guest, fixups);
  return finish(std::move(out), r, host, guest, std::move(fixups));
}

Forged forge(const FileArtifact& host, const FileArtifact& guest, Method method) {
  switch (method) {
    case Method::Stack: return stack(host, guest);
    case Method::Parasite: return parasite(host, guest);
    case Method::Zipper: return zipper(host, guest);
    case Method::Cavity: return cavity(host, guest);
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace polyglot::forge
