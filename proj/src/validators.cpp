#include <algorithm>
#include <cctype>

#include "polyglot/codecs.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/zip.hpp"

namespace polyglot::codecs {

namespace {

std::size_t color_table_size(std::uint8_t packed) { return 3u * (2u << (packed & 7)); }

// Skips a GIF sub-block chain starting at `at`; npos when it runs off the end.
std::size_t skip_sub_blocks(ByteView b, std::size_t at) {
  while (true) {
    if (at >= b.size()) return npos;
    const std::size_t n = b[at++];
    if (n == 0) return at;
    if (b.size() - at < n) return npos;
    at += n;
  }
}

bool validate_gif(ByteView b) {
  auto at_opt = gif_blocks_offset(b);
  if (!at_opt) return false;
  std::size_t at = *at_opt;
  int images = 0;
  while (at < b.size()) {
    switch (b[at]) {
      case 0x21:
        if (!fits(b, at, 2)) return false;
        at = skip_sub_blocks(b, at + 2);
        if (at == npos) return false;
        break;
      case 0x2C: {
        if (!fits(b, at, 11)) return false;
        const std::uint8_t packed = b[at + 9];
        at += 10;
        if (packed & 0x80) at += color_table_size(packed);
        if (at >= b.size() || b[at] < 2 || b[at] > 8) return false;
        at = skip_sub_blocks(b, at + 1);
        if (at == npos) return false;
        ++images;
        break;
      }
      case 0x3B: return images > 0;
      default: return false;
    }
  }
  return false;
}

bool validate_png(ByteView b) {
  static constexpr std::uint8_t kSig[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (!fits(b, 0, 8) || !std::equal(kSig, kSig + 8, b.begin())) return false;
  std::size_t at = 8;
  bool first = true;
  int idat = 0;
  while (true) {
    if (!fits(b, at, 12)) return false;
    const std::uint32_t len = read_be32(b, at);
    if (len > 0x7FFFFFFFu || !fits(b, at + 8, static_cast<std::size_t>(len) + 4)) return false;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!std::isalpha(b[at + 4 + i])) return false;
    }
    const std::string_view type(reinterpret_cast<const char*>(b.data() + at + 4), 4);
    if (crc32(b.subspan(at + 4, static_cast<std::size_t>(len) + 4)) != read_be32(b, at + 8 + len)) return false;
    if (first) {
      if (type != "IHDR" || len != 13) return false;
      const std::size_t d = at + 8;
      const std::uint8_t depth = b[d + 8], color = b[d + 9];
      if (read_be32(b, d) == 0 || read_be32(b, d + 4) == 0) return false;
      if (depth != 1 && depth != 2 && depth != 4 && depth != 8 && depth != 16) return false;
      if (color != 0 && color != 2 && color != 3 && color != 4 && color != 6) return false;
      first = false;
    } else if (type == "IDAT") {
      ++idat;
    } else if (type == "IEND") {
      return len == 0 && idat > 0;
    } else if (type == "IHDR") {
      return false;
    }
    at += 12 + static_cast<std::size_t>(len);
  }
}

bool validate_jpg(ByteView b) {
  if (!fits(b, 0, 2) || b[0] != 0xFF || b[1] != 0xD8) return false;
  bool sof = false, sos = false, dqt = false, dht = false;
  std::size_t at = 2;
  while (true) {
    if (at >= b.size() || b[at] != 0xFF) return false;
    while (at < b.size() && b[at] == 0xFF) ++at;
    if (at >= b.size()) return false;
    const std::uint8_t m = b[at++];
    if (m == 0xD9) return sof && sos && dqt && dht;
    if (m == 0x00 || m == 0xD8) return false;
    if ((m >= 0xD0 && m <= 0xD7) || m == 0x01) continue;
    if (!fits(b, at, 2)) return false;
    const std::size_t len = read_be16(b, at);
    if (len < 2 || !fits(b, at, len)) return false;
    if (m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC) {
      if (len < 8) return false;
      sof = true;
    } else if (m == 0xC4) {
      dht = true;
    } else if (m == 0xDB) {
      dqt = true;
    }
    at += len;
    if (m == 0xDA) {
      if (!sof) return false;
      sos = true;
      // entropy-coded data runs to the next real marker
      while (true) {
        if (at + 1 >= b.size()) return false;
        if (b[at] != 0xFF) {
          ++at;
          continue;
        }
        const std::uint8_t n = b[at + 1];
        if (n == 0x00 || (n >= 0xD0 && n <= 0xD7)) {
          at += 2;
        } else if (n == 0xFF) {
          ++at;
        } else {
          break;
        }
      }
    }
  }
}

bool validate_tiff(ByteView b) {
  if (!fits(b, 0, 8)) return false;
  bool little;
  if (b[0] == 'I' && b[1] == 'I') {
    little = true;
  } else if (b[0] == 'M' && b[1] == 'M') {
    little = false;
  } else {
    return false;
  }
  auto u16 = [&](std::size_t o) { return little ? read_le16(b, o) : read_be16(b, o); };
  auto u32 = [&](std::size_t o) { return little ? read_le32(b, o) : read_be32(b, o); };
  if (u16(2) != 42) return false;
  const std::size_t ifd = u32(4);
  if (ifd < 8 || !fits(b, ifd, 2)) return false;
  const std::size_t n = u16(ifd);
  if (n == 0 || !fits(b, ifd + 2, n * 12 + 4)) return false;
  static constexpr std::size_t kTypeSize[] = {0, 1, 1, 2, 4, 8, 1, 1, 2, 4, 8, 4, 8};
  std::uint32_t prev = 0;
  std::optional<std::uint64_t> strip_offset, strip_count;
  bool width = false, height = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t e = ifd + 2 + i * 12;
    const std::uint16_t tag = u16(e), type = u16(e + 2);
    const std::uint32_t count = u32(e + 4);
    if (tag <= prev && i > 0) return false;
    prev = tag;
    if (type == 0 || type > 12 || count == 0) return false;
    const std::uint64_t bytes = static_cast<std::uint64_t>(kTypeSize[type]) * count;
    if (bytes > 4 && (u32(e + 8) < 8 || !fits(b, u32(e + 8), static_cast<std::size_t>(bytes)))) return false;
    auto scalar = [&]() -> std::uint64_t { return type == 3 ? u16(e + 8) : u32(e + 8); };
    if (tag == 256) width = true;
    if (tag == 257) height = true;
    if (tag == 273 || tag == 279) {
      if (count != 1 || (type != 3 && type != 4)) return false;  // single strip layouts only
      (tag == 273 ? strip_offset : strip_count) = scalar();
    }
  }
  if (!width || !height || !strip_offset || !strip_count) return false;
  if (*strip_offset < 8 || !fits(b, static_cast<std::size_t>(*strip_offset), static_cast<std::size_t>(*strip_count)))
    return false;
  const std::size_t next = u32(ifd + 2 + n * 12);
  return next == 0 || (next >= 8 && fits(b, next, 2));
}

bool validate_dicom(ByteView b) { return dicom_layout(b).has_value(); }

bool validate_iso(ByteView b) {
  if (b.size() < kIsoMinSize) return false;
  const std::size_t pvd = kIsoSystemArea;
  if (b[pvd] != 1 || !starts_with_at(b, pvd + 1, "CD001") || b[pvd + 6] != 1) return false;
  if (read_le16(b, pvd + 128) != kIsoSector || read_be16(b, pvd + 130) != kIsoSector) return false;
  const std::uint32_t volume = read_le32(b, pvd + 80);
  if (read_be32(b, pvd + 84) != volume || volume < 17) return false;
  if (static_cast<std::uint64_t>(volume) * kIsoSector > b.size()) return false;
  if (b[pvd + 156] != 34) return false;
  const std::uint32_t root = read_le32(b, pvd + 158);
  return read_be32(b, pvd + 162) == root && root < volume;
}

bool validate_pe(ByteView b) { return pe_sections(b).has_value(); }

}  // namespace

std::optional<std::size_t> gif_blocks_offset(ByteView b) {
  if (!fits(b, 0, 13) || !(starts_with_at(b, 0, "GIF89a") || starts_with_at(b, 0, "GIF87a"))) return std::nullopt;
  const std::uint8_t packed = b[10];
  std::size_t at = 13;
  if (packed & 0x80) at += color_table_size(packed);
  if (at > b.size()) return std::nullopt;
  return at;
}

std::optional<std::size_t> jpg_insertion_offset(ByteView b) {
  if (!fits(b, 0, 4) || b[0] != 0xFF || b[1] != 0xD8) return std::nullopt;
  if (b[2] == 0xFF && b[3] == 0xE0 && fits(b, 4, 2)) {
    const std::size_t len = read_be16(b, 4);
    if (len >= 2 && fits(b, 4, len)) return 4 + len;
    return std::nullopt;
  }
  return 2;
}

std::optional<std::size_t> png_after_ihdr(ByteView b) {
  if (!fits(b, 8, 8 + 13 + 4) || !starts_with_at(b, 12, "IHDR") || read_be32(b, 8) != 13) return std::nullopt;
  return 8 + 12 + 13;
}

std::optional<DicomLayout> dicom_layout(ByteView b) {
  static constexpr std::string_view kLongVr[] = {"OB", "OW", "OF", "SQ", "UT", "UN", "OD",
                                                 "OL", "UC", "UR", "OV", "SV", "UV"};
  if (!starts_with_at(b, kDicomPreamble, "DICM")) return std::nullopt;
  std::size_t at = kDicomPreamble + 4;

  struct Element {
    std::uint32_t tag;
    std::size_t header;
    std::size_t length_field;
    std::size_t value;
    std::size_t length;
  };
  auto next = [&](std::size_t& pos) -> std::optional<Element> {
    if (!fits(b, pos, 8)) return std::nullopt;
    Element e{};
    e.header = pos;
    e.tag = (static_cast<std::uint32_t>(read_le16(b, pos)) << 16) | read_le16(b, pos + 2);
    if (!std::isupper(b[pos + 4]) || !std::isupper(b[pos + 5])) return std::nullopt;
    const std::string_view vr(reinterpret_cast<const char*>(b.data() + pos + 4), 2);
    const bool long_form = std::find(std::begin(kLongVr), std::end(kLongVr), vr) != std::end(kLongVr);
    if (long_form) {
      if (!fits(b, pos, 12)) return std::nullopt;
      e.length_field = pos + 8;
      e.length = read_le32(b, pos + 8);
      e.value = pos + 12;
    } else {
      e.length_field = pos + 6;
      e.length = read_le16(b, pos + 6);
      e.value = pos + 8;
    }
    if (e.length == 0xFFFFFFFFu || e.length % 2 != 0 || !fits(b, e.value, e.length)) return std::nullopt;
    pos = e.value + e.length;
    return e;
  };

  auto group_length = next(at);
  if (!group_length || group_length->tag != 0x00020000 || group_length->length != 4) return std::nullopt;
  const std::size_t group_end = at + read_le32(b, group_length->value);
  if (group_end > b.size()) return std::nullopt;
  std::uint32_t prev = group_length->tag;
  bool transfer_syntax = false;
  while (at < group_end) {
    auto e = next(at);
    if (!e || (e->tag >> 16) != 0x0002 || e->tag <= prev) return std::nullopt;
    transfer_syntax |= e->tag == 0x00020010;
    prev = e->tag;
  }
  if (at != group_end || !transfer_syntax) return std::nullopt;
  while (at < b.size()) {
    auto e = next(at);
    if (!e || e->tag <= prev) return std::nullopt;
    prev = e->tag;
    if (e->tag == 0x7FE00010) {
      return DicomLayout{e->header, e->length_field, e->value, e->length};
    }
  }
  return std::nullopt;
}

std::optional<std::vector<PeSection>> pe_sections(ByteView b) {
  if (!fits(b, 0, 64) || !starts_with_at(b, 0, "MZ")) return std::nullopt;
  const std::size_t nt = read_le32(b, 0x3C);
  if (nt < 4 || !fits(b, nt, 24) || !starts_with_at(b, nt, std::string_view("PE\0\0", 4))) return std::nullopt;
  const std::size_t count = read_le16(b, nt + 6);
  const std::size_t opt_size = read_le16(b, nt + 20);
  const std::size_t opt = nt + 24;
  if (count == 0 || count > 96 || opt_size < 96 || !fits(b, opt, opt_size)) return std::nullopt;
  const std::uint16_t magic = read_le16(b, opt);
  if (magic != 0x10B && magic != 0x20B) return std::nullopt;
  const std::uint32_t align = read_le32(b, opt + 36);
  if (align < 512 || align > 65536 || (align & (align - 1)) != 0) return std::nullopt;
  const std::size_t headers = read_le32(b, opt + 60);
  if (headers > b.size()) return std::nullopt;
  const std::size_t table = opt + opt_size;
  if (!fits(b, table, count * 40) || table + count * 40 > headers)
    return std::nullopt;
  std::vector<PeSection> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t h = table + i * 40;
    PeSection s;
    s.header_offset = h;
    s.virtual_size = read_le32(b, h + 8);
    s.raw_size = read_le32(b, h + 16);
    s.raw_offset = read_le32(b, h + 20);
    if (s.raw_size > 0) {
      if (s.raw_offset % align != 0 || s.raw_offset < headers || !fits(b, s.raw_offset, s.raw_size))
        return std::nullopt;
    }
    out.push_back(s);
  }
  return out;
}

bool validate(ByteView bytes, FileType type) noexcept {
  try {
    switch (type) {
      case FileType::PDF: return pdf::parse(bytes).has_value();
      case FileType::PNG: return validate_png(bytes);
      case FileType::GIF: return validate_gif(bytes);
      case FileType::JPG: return validate_jpg(bytes);
      case FileType::TIFF: return validate_tiff(bytes);
      case FileType::ZIP: return zip::parse(bytes).has_value();
      case FileType::JAR: {
        auto a = zip::parse(bytes);
        return a && a->has_entry(zip::kManifestName);
      }
      case FileType::DCM: return validate_dicom(bytes);
      case FileType::ISO: return validate_iso(bytes);
      case FileType::PE: return validate_pe(bytes);
    }
  } catch (...) {
  }
  return false;
}

}  // namespace polyglot::codecs
