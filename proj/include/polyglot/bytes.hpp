#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyglot {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Bounds-checked little/big endian readers. Callers check `fits` first;
// the readers themselves assume the range is valid.
inline bool fits(ByteView b, std::size_t offset, std::size_t width) {
  return offset <= b.size() && width <= b.size() - offset;
}

inline std::uint16_t read_le16(ByteView b, std::size_t o) {
  return static_cast<std::uint16_t>(b[o] | (b[o + 1] << 8));
}
inline std::uint32_t read_le32(ByteView b, std::size_t o) {
  return static_cast<std::uint32_t>(b[o]) | (static_cast<std::uint32_t>(b[o + 1]) << 8) |
         (static_cast<std::uint32_t>(b[o + 2]) << 16) | (static_cast<std::uint32_t>(b[o + 3]) << 24);
}
inline std::uint16_t read_be16(ByteView b, std::size_t o) {
  return static_cast<std::uint16_t>((b[o] << 8) | b[o + 1]);
}
inline std::uint32_t read_be32(ByteView b, std::size_t o) {
  return (static_cast<std::uint32_t>(b[o]) << 24) | (static_cast<std::uint32_t>(b[o + 1]) << 16) |
         (static_cast<std::uint32_t>(b[o + 2]) << 8) | static_cast<std::uint32_t>(b[o + 3]);
}

void put_le16(Bytes& out, std::uint16_t v);
void put_le32(Bytes& out, std::uint32_t v);
void put_be16(Bytes& out, std::uint16_t v);
void put_be32(Bytes& out, std::uint32_t v);
void put_str(Bytes& out, std::string_view s);
void append(Bytes& out, ByteView more);

void write_le16(Bytes& b, std::size_t o, std::uint16_t v);
void write_le32(Bytes& b, std::size_t o, std::uint32_t v);
void write_be16(Bytes& b, std::size_t o, std::uint16_t v);

/// First occurrence of `needle` at or after `from`, or npos.
std::size_t find(ByteView hay, ByteView needle, std::size_t from = 0);
std::size_t find(ByteView hay, std::string_view needle, std::size_t from = 0);
/// Last occurrence of `needle` starting at or before `before`, or npos.
std::size_t rfind(ByteView hay, ByteView needle, std::size_t before = npos);
std::size_t rfind(ByteView hay, std::string_view needle, std::size_t before = npos);

bool starts_with_at(ByteView hay, std::size_t offset, std::string_view magic);
bool all_zero(ByteView b);

ByteView as_view(std::string_view s);
std::uint32_t crc32(ByteView b);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView data);

}  // namespace polyglot
