#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyglot/bytes.hpp"

namespace polyglot::zip {

inline constexpr std::uint32_t kLocalSig = 0x04034b50;
inline constexpr std::uint32_t kCentralSig = 0x02014b50;
inline constexpr std::uint32_t kEocdSig = 0x06054b50;
inline constexpr std::size_t kLocalHeaderSize = 30;
inline constexpr std::size_t kCentralHeaderSize = 46;
inline constexpr std::size_t kEocdSize = 22;
/// Largest distance from the end of file at which an EOCD can start.
inline constexpr std::size_t kEocdSearchWindow = 66000;
inline constexpr std::string_view kManifestName = "META-INF/MANIFEST.MF";

inline constexpr std::uint16_t kStored = 0;
inline constexpr std::uint16_t kDeflated = 8;

/// Logical archive member.
struct Entry {
  std::string name;
  Bytes data;
};

/// One central-directory record as found in a byte buffer. `*_field` members
/// are absolute positions of the corresponding fields, used for fixups.
struct CentralRecord {
  std::string name;
  std::uint16_t method = 0;
  std::uint32_t crc = 0;
  std::uint32_t compressed_size = 0;
  std::uint32_t uncompressed_size = 0;
  std::uint32_t local_offset = 0;
  std::size_t record_offset = 0;
  std::size_t local_offset_field = 0;
  std::size_t data_offset = 0;
};

struct Archive {
  std::size_t eocd_offset = 0;
  std::size_t cd_offset = 0;
  std::size_t cd_size = 0;
  std::size_t cd_offset_field = 0;
  std::vector<CentralRecord> entries;

  bool has_entry(std::string_view name) const;
  /// Offset of the lowest local header.
  std::size_t start_offset() const;
  /// One past the EOCD record (comment excluded).
  std::size_t end_offset() const { return eocd_offset + kEocdSize; }
};

// Record writers. Times are fixed DOS stamps so output is reproducible.
void write_local_header(Bytes& out, std::string_view name, std::uint16_t method, std::uint32_t crc,
                        std::uint32_t compressed_size, std::uint32_t uncompressed_size);
void write_central_record(Bytes& out, std::string_view name, std::uint16_t method, std::uint32_t crc,
                          std::uint32_t compressed_size, std::uint32_t uncompressed_size,
                          std::uint32_t local_offset, ByteView comment = {});
void write_eocd(Bytes& out, std::uint16_t entry_count, std::uint32_t cd_size, std::uint32_t cd_offset,
                ByteView comment = {});

/// Stored (method 0) archive with the entries in order.
Bytes build(std::span<const Entry> entries);

/// Parses the archive whose EOCD starts at `eocd_offset`, checking every
/// structural rule: the central directory sits immediately before the EOCD,
/// every recorded local offset points at a local header carrying the same
/// name and sizes, member data precedes the central directory, and stored
/// members match their CRC.
std::optional<Archive> parse_at(ByteView bytes, std::size_t eocd_offset);

/// Scans backwards for the last EOCD that yields a valid archive. When
/// `window` is set only EOCDs starting within the last `window` bytes count.
std::optional<Archive> parse(ByteView bytes, std::optional<std::size_t> window = std::nullopt);

/// Decompressed member content, or nullopt when it cannot be recovered or
/// its CRC does not match.
std::optional<Bytes> extract(ByteView bytes, const CentralRecord& record);

}  // namespace polyglot::zip
