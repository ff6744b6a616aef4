#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyglot/bytes.hpp"
#include "polyglot/file_type.hpp"

namespace polyglot::forge {

struct Recipe {
  FileType host;
  FileType guest;
  Method method;
  bool operator==(const Recipe&) const = default;
};

std::string to_string(const Recipe& r);

/// A rewritten offset field. `delta` is the amount added to the value the
/// field held in its donor.
struct OffsetFixup {
  std::size_t position = 0;
  std::size_t width = 0;
  std::int64_t delta = 0;
  std::string description;
};

struct Forged {
  FileArtifact artifact;
  std::vector<OffsetFixup> fixups;
};

bool is_applicable(const Recipe& r);

/// Full applicability matrix, ordered by method, then host, then guest.
std::vector<Recipe> enumerate_recipes();

/// The 21 host/guest/method combinations used by the default corpus.
std::vector<Recipe> default_corpus_recipes();

/// Combines two monoglot donors. Throws Error with InapplicableRecipe,
/// GuestTooLarge or FixupOverflow.
Forged forge(const FileArtifact& host, const FileArtifact& guest, Method method);

/// Guest appended after the host; archive offsets shifted by the host size.
Forged stack(const FileArtifact& host, const FileArtifact& guest);
/// Guest carried in the host's comment container at its earliest legal point.
Forged parasite(const FileArtifact& host, const FileArtifact& guest);
/// DICOM host and guest wrapped in each other's comment constructs.
Forged zipper(const FileArtifact& host, const FileArtifact& guest);
/// Guest written into the first zero-padded region large enough to hold it.
Forged cavity(const FileArtifact& host, const FileArtifact& guest);

/// Canonical serialization of what a consumer of `type` sees in `bytes`:
/// archive members, non-comment image blocks/chunks/segments, or the PDF
/// objects reachable from the catalog. Comment containers are excluded, so
/// a guest donor and the polyglot carrying it produce equal content.
std::optional<Bytes> logical_content(ByteView bytes, FileType type);

}  // namespace polyglot::forge
