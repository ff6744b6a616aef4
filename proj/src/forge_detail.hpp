#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyglot/error.hpp"
#include "polyglot/forge.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/zip.hpp"

namespace polyglot::forge::detail {

[[noreturn]] void fail(ErrorCode code, const std::string& msg);

zip::Archive archive_of(const FileArtifact& guest);

/// Writes `updated` into a 32-bit little-endian field and records the change.
void patch_offset(Bytes& out, std::size_t position, std::int64_t original, std::int64_t updated,
                  std::string description, std::vector<OffsetFixup>& fixups);

/// Adds `delta` to every offset field of archive `a`, which was copied
/// verbatim to `placed_at`.
void shift_archive(Bytes& out, std::size_t placed_at, const zip::Archive& a, std::int64_t delta,
                   std::vector<OffsetFixup>& fixups);

/// Records xref entries whose offsets moved when `before` was re-serialized by
/// `w`, whose first byte landed at `written_at` in the output.
void record_xref(const pdf::Document& before, const pdf::Writer& w, std::size_t written_at,
                 std::vector<OffsetFixup>& fixups);

Bytes parasite_png(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups);
Bytes parasite_gif(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups);
Bytes parasite_jpg(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups);
Bytes parasite_pdf(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups);
Bytes zipper_dicom_gif(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups);
Bytes zipper_dicom_pdf(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups);

}  // namespace polyglot::forge::detail
