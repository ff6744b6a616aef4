#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "polyglot/bytes.hpp"

namespace polyglot {

// Closed set of supported types. The numeric order is the tie-break order
// for identification and the slot order of the mime one-hot block.
enum class FileType : std::uint8_t { PDF, PNG, GIF, JPG, TIFF, ZIP, JAR, DCM, ISO, PE };

inline constexpr std::size_t kFileTypeCount = 10;

inline constexpr std::array<FileType, kFileTypeCount> kAllFileTypes = {
    FileType::PDF, FileType::PNG, FileType::GIF, FileType::JPG, FileType::TIFF,
    FileType::ZIP, FileType::JAR, FileType::DCM, FileType::ISO, FileType::PE};

enum class Method : std::uint8_t { Stack, Parasite, Zipper, Cavity };

inline constexpr std::array<Method, 4> kAllMethods = {Method::Stack, Method::Parasite, Method::Zipper,
                                                       Method::Cavity};

std::string_view name_of(FileType t);
std::string_view mime_of(FileType t);
/// Identification result mime; nullopt stands for Unknown.
std::string_view mime_of(std::optional<FileType> t);
std::string_view extension_of(FileType t);
std::optional<FileType> parse_file_type(std::string_view name);

std::string_view name_of(Method m);
std::optional<Method> parse_method(std::string_view name);

/// A byte sequence plus its provenance. Monoglots carry one declared type
/// and no method; polyglots carry two types (host first) and a method.
struct FileArtifact {
  Bytes bytes;
  std::vector<FileType> declared_types;
  std::optional<Method> method;
  std::uint64_t seed = 0;

  bool is_polyglot() const { return declared_types.size() == 2; }
  FileType primary_type() const { return declared_types.front(); }
};

}  // namespace polyglot
