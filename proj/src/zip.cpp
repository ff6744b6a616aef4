#include "polyglot/zip.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>

namespace polyglot::zip {

namespace {

constexpr std::uint16_t kDosTime = 0x6000;  // 12:00:00
constexpr std::uint16_t kDosDate = 0x5821;  // 2024-01-01
constexpr std::uint16_t kVersion = 20;

std::optional<CentralRecord> read_central(ByteView b, std::size_t at, std::size_t limit) {
  if (at > limit || limit - at < kCentralHeaderSize || read_le32(b, at) != kCentralSig) return std::nullopt;
  CentralRecord r;
  r.record_offset = at;
  const std::uint16_t flags = read_le16(b, at + 8);
  r.method = read_le16(b, at + 10);
  r.crc = read_le32(b, at + 16);
  r.compressed_size = read_le32(b, at + 20);
  r.uncompressed_size = read_le32(b, at + 24);
  const std::size_t name_len = read_le16(b, at + 28);
  const std::size_t extra_len = read_le16(b, at + 30);
  const std::size_t comment_len = read_le16(b, at + 32);
  r.local_offset = read_le32(b, at + 42);
  r.local_offset_field = at + 42;
  if ((flags & 0x0001) != 0) return std::nullopt;  // encryption unsupported
  const std::size_t total = kCentralHeaderSize + name_len + extra_len + comment_len;
  if (limit - at < total) return std::nullopt;
  r.name.assign(reinterpret_cast<const char*>(b.data() + at + kCentralHeaderSize), name_len);
  return r;
}

std::size_t central_record_size(ByteView b, std::size_t at) {
  return kCentralHeaderSize + read_le16(b, at + 28) + read_le16(b, at + 30) + read_le16(b, at + 32);
}

bool check_local(ByteView b, CentralRecord& r, std::size_t cd_offset) {
  const std::size_t at = r.local_offset;
  if (!fits(b, at, kLocalHeaderSize) || at + kLocalHeaderSize > cd_offset) return false;
  if (read_le32(b, at) != kLocalSig) return false;
  const std::uint16_t flags = read_le16(b, at + 6);
  if (read_le16(b, at + 8) != r.method) return false;
  const std::size_t name_len = read_le16(b, at + 26);
  const std::size_t extra_len = read_le16(b, at + 28);
  if (name_len != r.name.size() || !fits(b, at + kLocalHeaderSize, name_len)) return false;
  if (!std::equal(r.name.begin(), r.name.end(), b.begin() + static_cast<std::ptrdiff_t>(at + kLocalHeaderSize)))
    return false;
  if ((flags & 0x0008) == 0) {
    if (read_le32(b, at + 14) != r.crc || read_le32(b, at + 18) != r.compressed_size ||
        read_le32(b, at + 22) != r.uncompressed_size)
      return false;
  }
  r.data_offset = at + kLocalHeaderSize + name_len + extra_len;
  if (r.data_offset > cd_offset || cd_offset - r.data_offset < r.compressed_size) return false;
  if (r.method == kStored) {
    if (r.compressed_size != r.uncompressed_size) return false;
    if (crc32(b.subspan(r.data_offset, r.compressed_size)) != r.crc) return false;
  } else if (r.method != kDeflated) {
    return false;
  }
  return true;
}

}  // namespace

bool Archive::has_entry(std::string_view name) const {
  return std::any_of(entries.begin(), entries.end(), [&](const CentralRecord& r) { return r.name == name; });
}

std::size_t Archive::start_offset() const {
  std::size_t lowest = cd_offset;
  for (const auto& e : entries) lowest = std::min<std::size_t>(lowest, e.local_offset);
  return lowest;
}

void write_local_header(Bytes& out, std::string_view name, std::uint16_t method, std::uint32_t crc,
                        std::uint32_t compressed_size, std::uint32_t uncompressed_size) {
  put_le32(out, kLocalSig);
  put_le16(out, kVersion);
  put_le16(out, 0);
  put_le16(out, method);
  put_le16(out, kDosTime);
  put_le16(out, kDosDate);
  put_le32(out, crc);
  put_le32(out, compressed_size);
  put_le32(out, uncompressed_size);
  put_le16(out, static_cast<std::uint16_t>(name.size()));
  put_le16(out, 0);
  put_str(out, name);
}

void write_central_record(Bytes& out, std::string_view name, std::uint16_t method, std::uint32_t crc,
                          std::uint32_t compressed_size, std::uint32_t uncompressed_size,
                          std::uint32_t local_offset, ByteView comment) {
  put_le32(out, kCentralSig);
  put_le16(out, kVersion);
  put_le16(out, kVersion);
  put_le16(out, 0);
  put_le16(out, method);
  put_le16(out, kDosTime);
  put_le16(out, kDosDate);
  put_le32(out, crc);
  put_le32(out, compressed_size);
  put_le32(out, uncompressed_size);
  put_le16(out, static_cast<std::uint16_t>(name.size()));
  put_le16(out, 0);
  put_le16(out, static_cast<std::uint16_t>(comment.size()));
  put_le16(out, 0);
  put_le16(out, 0);
  put_le32(out, 0);
  put_le32(out, local_offset);
  put_str(out, name);
  append(out, comment);
}

void write_eocd(Bytes& out, std::uint16_t entry_count, std::uint32_t cd_size, std::uint32_t cd_offset,
                ByteView comment) {
  put_le32(out, kEocdSig);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le16(out, entry_count);
  put_le16(out, entry_count);
  put_le32(out, cd_size);
  put_le32(out, cd_offset);
  put_le16(out, static_cast<std::uint16_t>(comment.size()));
  append(out, comment);
}

Bytes build(std::span<const Entry> entries) {
  Bytes out;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> crcs;
  for (const auto& e : entries) {
    offsets.push_back(static_cast<std::uint32_t>(out.size()));
    crcs.push_back(crc32(e.data));
    const auto size = static_cast<std::uint32_t>(e.data.size());
    write_local_header(out, e.name, kStored, crcs.back(), size, size);
    append(out, e.data);
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto size = static_cast<std::uint32_t>(entries[i].data.size());
    write_central_record(out, entries[i].name, kStored, crcs[i], size, size, offsets[i]);
  }
  const auto cd_size = static_cast<std::uint32_t>(out.size() - cd_offset);
  write_eocd(out, static_cast<std::uint16_t>(entries.size()), cd_size, cd_offset);
  return out;
}

std::optional<Archive> parse_at(ByteView b, std::size_t eocd) {
  if (!fits(b, eocd, kEocdSize) || read_le32(b, eocd) != kEocdSig) return std::nullopt;
  if (read_le16(b, eocd + 4) != 0 || read_le16(b, eocd + 6) != 0) return std::nullopt;
  const std::size_t count = read_le16(b, eocd + 8);
  if (read_le16(b, eocd + 10) != count || count == 0) return std::nullopt;
  Archive a;
  a.eocd_offset = eocd;
  a.cd_size = read_le32(b, eocd + 12);
  a.cd_offset = read_le32(b, eocd + 16);
  a.cd_offset_field = eocd + 16;
  const std::size_t comment_len = read_le16(b, eocd + 20);
  if (!fits(b, eocd + kEocdSize, comment_len)) return std::nullopt;
  if (a.cd_offset > eocd || eocd - a.cd_offset != a.cd_size) return std::nullopt;

  std::size_t at = a.cd_offset;
  for (std::size_t i = 0; i < count; ++i) {
    auto rec = read_central(b, at, eocd);
    if (!rec) return std::nullopt;
    at += central_record_size(b, at);
    if (!check_local(b, *rec, a.cd_offset)) return std::nullopt;
    a.entries.push_back(std::move(*rec));
  }
  if (at != eocd) return std::nullopt;
  return a;
}

std::optional<Archive> parse(ByteView b, std::optional<std::size_t> window) {
  static constexpr std::uint8_t kSig[] = {'P', 'K', 5, 6};
  if (b.size() < kEocdSize) return std::nullopt;
  const std::size_t floor = window && *window < b.size() ? b.size() - *window : 0;
  std::size_t pos = b.size() - kEocdSize;
  while (true) {
    pos = rfind(b, ByteView(kSig), pos);
    if (pos == npos || pos < floor) return std::nullopt;
    if (auto a = parse_at(b, pos)) return a;
    if (pos == 0) return std::nullopt;
    --pos;
  }
}

std::optional<Bytes> extract(ByteView b, const CentralRecord& r) {
  if (!fits(b, r.data_offset, r.compressed_size)) return std::nullopt;
  ByteView raw = b.subspan(r.data_offset, r.compressed_size);
  Bytes out;
  if (r.method == kStored) {
    out.assign(raw.begin(), raw.end());
  } else if (r.method == kDeflated) {
    // One spare byte so next_out is never null and overlong streams are caught.
    out.resize(static_cast<std::size_t>(r.uncompressed_size) + 1);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) return std::nullopt;
    zs.next_in = const_cast<Bytef*>(raw.data());
    zs.avail_in = static_cast<uInt>(raw.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const bool complete = rc == Z_STREAM_END && zs.total_out == r.uncompressed_size;
    inflateEnd(&zs);
    if (!complete) return std::nullopt;
    out.pop_back();
  } else {
    return std::nullopt;
  }
  if (crc32(out) != r.crc) return std::nullopt;
  return out;
}

}  // namespace polyglot::zip
