#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "polyglot/bytes.hpp"
#include "polyglot/file_type.hpp"

namespace polyglot::codecs {

inline constexpr std::size_t kUnlimited = static_cast<std::size_t>(-1);

struct Capabilities {
  bool requires_magic_at_zero = true;
  std::size_t magic_window = 0;  // bytes from offset zero in which the magic may start
  bool comment_capable = false;
  std::size_t max_comment_payload = 0;  // per comment construct; kUnlimited when unbounded
  bool cavity_host = false;
};

const Capabilities& capabilities(FileType type);

struct SizeBounds {
  std::size_t min = 0;
  std::size_t max = 0;
};

/// Accepted payload_size range for generate_monoglot.
SizeBounds size_bounds(FileType type);

/// Deterministic minimal valid file of roughly `payload_size` bytes (ISO
/// rounds up to whole sectors, PE to whole file-alignment units). Each type
/// fills its payload with a characteristic byte texture.
/// Throws Error(UnsupportedSize) outside size_bounds(type).
FileArtifact generate_monoglot(FileType type, std::uint64_t seed, std::size_t payload_size);

/// Structural acceptance test. Never throws.
bool validate(ByteView bytes, FileType type) noexcept;

struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const Span&) const = default;
};

/// Zero-filled, structurally inert regions. Throws Error(NotACavityHost)
/// for types that cannot host cavities; returns nothing for bytes that do
/// not parse as `type`.
std::vector<Span> locate_cavities(ByteView bytes, FileType type);

// ---- layout probes shared with the forge and the signature engine ----

inline constexpr std::size_t kIsoSector = 2048;
inline constexpr std::size_t kIsoSystemArea = 16 * kIsoSector;
inline constexpr std::size_t kIsoMinSize = kIsoSystemArea + kIsoSector;
inline constexpr std::size_t kDicomPreamble = 128;
inline constexpr std::size_t kPeFileAlignment = 512;

/// Offset of the first block after the GIF header, screen descriptor and
/// global color table.
std::optional<std::size_t> gif_blocks_offset(ByteView bytes);
/// Offset just past the JFIF APP0 segment (or SOI when APP0 is absent).
std::optional<std::size_t> jpg_insertion_offset(ByteView bytes);
/// Offset just past the IHDR chunk.
std::optional<std::size_t> png_after_ihdr(ByteView bytes);

struct DicomLayout {
  std::size_t pixel_header_offset = 0;  // tag of (7FE0,0010)
  std::size_t pixel_length_field = 0;
  std::size_t pixel_value_offset = 0;
  std::size_t pixel_value_length = 0;
};
std::optional<DicomLayout> dicom_layout(ByteView bytes);

struct PeSection {
  std::size_t header_offset = 0;
  std::size_t raw_offset = 0;
  std::size_t raw_size = 0;
  std::size_t virtual_size = 0;
};
std::optional<std::vector<PeSection>> pe_sections(ByteView bytes);

/// One-section PE32 image: `used_bytes` of code followed by zero padding up
/// to `raw_size` (rounded up to the file alignment).
Bytes build_pe(std::uint64_t seed, std::size_t used_bytes, std::size_t raw_size);

}  // namespace polyglot::codecs
