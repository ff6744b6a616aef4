#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyglot/bytes.hpp"
#include "polyglot/file_type.hpp"

namespace polyglot::magic {

/// Fixed anchor: `magic` must start somewhere in [min_offset, max_offset].
struct SignatureRule {
  FileType type;
  std::size_t min_offset;
  std::size_t max_offset;
  std::string_view magic;
};

const std::vector<SignatureRule>& signature_rules();

struct Match {
  FileType type;
  std::size_t offset;
  bool operator==(const Match&) const = default;
};

struct IdReport {
  std::optional<FileType> primary;
  std::vector<Match> all_matches;  // ascending offset, one per type
  bool is_polyglot = false;

  std::string mime() const { return std::string(mime_of(primary)); }
  bool operator==(const IdReport&) const = default;
};

struct ScanOptions {
  /// Also look for an archive directory near the end of the file.
  bool trailing_zip_scan = true;
};

/// Anchored signatures only; reports the single best match, so it never
/// flags a polyglot. Ties go to the lowest offset, then FileType order.
IdReport identify_strict(ByteView bytes);

/// Anchors plus trailing-archive and embedded image signature searches.
IdReport identify_scan(ByteView bytes, const ScanOptions& options = {});

/// "<offset>\t<type>\t<mime>" per match, primary first when strict.
std::string format_report(const IdReport& report);

}  // namespace polyglot::magic
