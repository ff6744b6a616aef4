#include "polyglot/bytes.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "polyglot/error.hpp"

namespace polyglot {

void put_le16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_le32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_be16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_be32(Bytes& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_str(Bytes& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }

void append(Bytes& out, ByteView more) { out.insert(out.end(), more.begin(), more.end()); }

void write_le16(Bytes& b, std::size_t o, std::uint16_t v) {
  b[o] = static_cast<std::uint8_t>(v);
  b[o + 1] = static_cast<std::uint8_t>(v >> 8);
}

void write_le32(Bytes& b, std::size_t o, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[o + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void write_be16(Bytes& b, std::size_t o, std::uint16_t v) {
  b[o] = static_cast<std::uint8_t>(v >> 8);
  b[o + 1] = static_cast<std::uint8_t>(v);
}

std::size_t find(ByteView hay, ByteView needle, std::size_t from) {
  if (needle.empty() || from > hay.size() || needle.size() > hay.size() - from) return npos;
  auto it = std::search(hay.begin() + static_cast<std::ptrdiff_t>(from), hay.end(),
                        std::boyer_moore_horspool_searcher(needle.begin(), needle.end()));
  return it == hay.end() ? npos : static_cast<std::size_t>(it - hay.begin());
}

std::size_t find(ByteView hay, std::string_view needle, std::size_t from) {
  return find(hay, as_view(needle), from);
}

std::size_t rfind(ByteView hay, ByteView needle, std::size_t before) {
  if (needle.empty() || needle.size() > hay.size()) return npos;
  std::size_t start = std::min(before, hay.size() - needle.size());
  for (std::size_t i = start + 1; i-- > 0;) {
    if (hay[i] == needle[0] && std::memcmp(hay.data() + i, needle.data(), needle.size()) == 0) return i;
  }
  return npos;
}

std::size_t rfind(ByteView hay, std::string_view needle, std::size_t before) {
  return rfind(hay, as_view(needle), before);
}

bool starts_with_at(ByteView hay, std::size_t offset, std::string_view magic) {
  if (!fits(hay, offset, magic.size())) return false;
  return std::memcmp(hay.data() + offset, magic.data(), magic.size()) == 0;
}

bool all_zero(ByteView b) {
  return std::all_of(b.begin(), b.end(), [](std::uint8_t v) { return v == 0; });
}

ByteView as_view(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::uint32_t crc32(ByteView b) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  std::size_t done = 0;
  while (done < b.size()) {
    std::size_t n = std::min<std::size_t>(b.size() - done, 1u << 30);
    crc = ::crc32(crc, b.data() + done, static_cast<uInt>(n));
    done += n;
  }
  return static_cast<std::uint32_t>(crc);
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::UnreadableFile, path);
  return data;
}

void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path);
}

}  // namespace polyglot
