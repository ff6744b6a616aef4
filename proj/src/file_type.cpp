#include "polyglot/file_type.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "polyglot/error.hpp"

namespace polyglot {

namespace {

struct TypeInfo {
  std::string_view name;
  std::string_view mime;
  std::string_view extension;
};

constexpr std::array<TypeInfo, kFileTypeCount> kTypeInfo = {{
    {"PDF", "application/pdf", "pdf"},
    {"PNG", "image/png", "png"},
    {"GIF", "image/gif", "gif"},
    {"JPG", "image/jpeg", "jpg"},
    {"TIFF", "image/tiff", "tif"},
    {"ZIP", "application/zip", "zip"},
    {"JAR", "application/java-archive", "jar"},
    {"DCM", "application/dicom", "dcm"},
    {"ISO", "application/x-iso9660-image", "iso"},
    {"PE", "application/vnd.microsoft.portable-executable", "exe"},
}};

constexpr std::array<std::string_view, 4> kMethodNames = {"stack", "parasite", "zipper", "cavity"};

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::NotACavityHost: return "NotACavityHost";
    case ErrorCode::InapplicableRecipe: return "InapplicableRecipe";
    case ErrorCode::GuestTooLarge: return "GuestTooLarge";
    case ErrorCode::FixupOverflow: return "FixupOverflow";
    case ErrorCode::AlreadyAugmented: return "AlreadyAugmented";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::IoFailure: return "IOFailure";
    case ErrorCode::CoverageMismatch: return "CoverageMismatch";
    case ErrorCode::ModelLayoutMismatch: return "ModelLayoutMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view name_of(FileType t) { return kTypeInfo[static_cast<std::size_t>(t)].name; }
std::string_view mime_of(FileType t) { return kTypeInfo[static_cast<std::size_t>(t)].mime; }
std::string_view extension_of(FileType t) { return kTypeInfo[static_cast<std::size_t>(t)].extension; }

std::string_view mime_of(std::optional<FileType> t) {
  return t ? mime_of(*t) : std::string_view("application/octet-stream");
}

std::optional<FileType> parse_file_type(std::string_view name) {
  std::string u = upper(name);
  if (u == "JPEG") u = "JPG";
  if (u == "TIF") u = "TIFF";
  if (u == "DICOM") u = "DCM";
  for (FileType t : kAllFileTypes) {
    if (name_of(t) == u) return t;
  }
  return std::nullopt;
}

std::string_view name_of(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

std::optional<Method> parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Method m : kAllMethods) {
    if (name_of(m) == lower) return m;
  }
  return std::nullopt;
}

}  // namespace polyglot
