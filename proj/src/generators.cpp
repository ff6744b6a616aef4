#include <zlib.h>

#include <algorithm>
#include <array>
#include <string>

#include "polyglot/codecs.hpp"
#include "polyglot/error.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/rng.hpp"
#include "polyglot/zip.hpp"
#include "texture.hpp"

namespace polyglot {

namespace detail {

void fill(Rng& rng, Texture texture, Bytes& out, std::size_t n) {
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t r = rng.next();
    std::uint8_t v = 0;
    switch (texture) {
      case Texture::Uniform: v = static_cast<std::uint8_t>(r >> 56); break;
      case Texture::Text: v = static_cast<std::uint8_t>(0x20 + (r >> 32) % 0x5F); break;
      case Texture::GrayBand: v = static_cast<std::uint8_t>(0x80 + (r >> 32) % 0x40); break;
      case Texture::LowCodes: v = static_cast<std::uint8_t>((r >> 32) % 0x40); break;
      case Texture::HighCodes: v = static_cast<std::uint8_t>(0xC0 + (r >> 32) % 0x3F); break;
      case Texture::MidBand: v = static_cast<std::uint8_t>(0x40 + (r >> 32) % 0x40); break;
      case Texture::Code:
        // opcode-ish spread below 0xC0 with a heavy zero bias
        v = (r & 3) == 0 ? 0 : static_cast<std::uint8_t>((r >> 32) % 0xC0);
        break;
    }
    out.push_back(v);
  }
}

std::string words(Rng& rng, std::size_t n) {
  static constexpr std::array<std::string_view, 16> kWords = {
      "lorem", "ipsum", "dolor", "sit", "amet", "file", "format", "sector",
      "image", "page", "archive", "volume", "header", "record", "table", "data"};
  std::string s;
  while (true) {
    std::string_view w = kWords[rng.below(kWords.size())];
    if (s.size() + w.size() + 1 > n) break;
    if (!s.empty()) s.push_back(' ');
    s.append(w);
  }
  return s;
}

}  // namespace detail

namespace codecs {

namespace {

using detail::Texture;

std::size_t align_up(std::size_t v, std::size_t a) { return (v + a - 1) / a * a; }

// ---- GIF ----

// Writes a data sub-block chain for `content`, terminator included.
void put_sub_blocks(Bytes& out, ByteView content) {
  std::size_t at = 0;
  while (at < content.size()) {
    const std::size_t n = std::min<std::size_t>(255, content.size() - at);
    out.push_back(static_cast<std::uint8_t>(n));
    append(out, content.subspan(at, n));
    at += n;
  }
  out.push_back(0);
}

Bytes make_gif(Rng& rng, std::size_t target) {
  Bytes out;
  put_str(out, "GIF89a");
  const auto w = static_cast<std::uint16_t>(rng.between(1, 64));
  const auto h = static_cast<std::uint16_t>(rng.between(1, 64));
  const auto depth = static_cast<unsigned>(rng.between(0, 3));  // 2^(depth+1) colors
  put_le16(out, w);
  put_le16(out, h);
  out.push_back(static_cast<std::uint8_t>(0x80 | (depth << 4) | depth));
  out.push_back(0);
  out.push_back(0);
  detail::fill(rng, Texture::LowCodes, out, 3u * (2u << depth));
  // graphic control extension
  for (std::uint8_t b : {0x21, 0xF9, 0x04, 0x00, 0x00, 0x00, 0x00, 0x00}) out.push_back(b);
  out.push_back(0x2C);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le16(out, w);
  put_le16(out, h);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(std::max(2u, depth + 1)));
  const std::size_t fixed = out.size() + 2;
  std::size_t data_len = target > fixed ? target - fixed : 1;
  data_len -= data_len / 256;  // room for sub-block length bytes
  Bytes data;
  detail::fill(rng, Texture::LowCodes, data, std::max<std::size_t>(1, data_len));
  put_sub_blocks(out, data);
  out.push_back(0x3B);
  return out;
}

// ---- PNG ----

void put_png_chunk(Bytes& out, std::string_view type, ByteView data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_from = out.size();
  put_str(out, type);
  append(out, data);
  put_be32(out, crc32(ByteView(out).subspan(crc_from)));
}

Bytes make_png(Rng& rng, std::size_t target) {
  const auto width = static_cast<std::uint32_t>(rng.between(8, 64));
  const std::size_t overhead = 8 + 25 + 12 + 12 + 11;
  std::size_t raw_budget = target > overhead ? target - overhead : width + 1;
  raw_budget -= (raw_budget / 65535) * 5;
  const auto rows = static_cast<std::uint32_t>(std::max<std::size_t>(1, raw_budget / (width + 1)));

  Bytes raw;
  raw.reserve(static_cast<std::size_t>(rows) * (width + 1));
  for (std::uint32_t r = 0; r < rows; ++r) {
    raw.push_back(0);  // filter: none
    detail::fill(rng, Texture::GrayBand, raw, width);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  Bytes z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), Z_NO_COMPRESSION) != Z_OK)
    throw Error(ErrorCode::IoFailure, "zlib compress failed");
  z.resize(zlen);

  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  Bytes ihdr;
  put_be32(ihdr, width);
  put_be32(ihdr, rows);
  for (std::uint8_t b : {8, 0, 0, 0, 0}) ihdr.push_back(b);
  put_png_chunk(out, "IHDR", ihdr);
  put_png_chunk(out, "IDAT", z);
  put_png_chunk(out, "IEND", {});
  return out;
}

// ---- JPG ----

Bytes make_jpg(Rng& rng, std::size_t target) {
  Bytes out = {0xFF, 0xD8};
  // APP0 / JFIF 1.01
  for (int b : {0xFF, 0xE0, 0x00, 0x10, 0x4A, 0x46, 0x49, 0x46, 0x00, 0x01, 0x01, 0x00, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00})
    out.push_back(static_cast<std::uint8_t>(b));
  // DQT, one 8-bit table
  for (std::uint8_t b : {0xFF, 0xDB, 0x00, 0x43, 0x00}) out.push_back(b);
  for (int i = 0; i < 64; ++i) out.push_back(static_cast<std::uint8_t>(rng.between(1, 0x3F)));
  // SOF0, one component
  const auto h = static_cast<std::uint16_t>(rng.between(8, 256));
  const auto w = static_cast<std::uint16_t>(rng.between(8, 256));
  for (std::uint8_t b : {0xFF, 0xC0, 0x00, 0x0B, 0x08}) out.push_back(b);
  put_be16(out, h);
  put_be16(out, w);
  for (std::uint8_t b : {0x01, 0x01, 0x11, 0x00}) out.push_back(b);
  // DHT: standard luminance DC table
  static constexpr std::array<std::uint8_t, 16> kCounts = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  for (std::uint8_t b : {0xFF, 0xC4, 0x00, 0x1F, 0x00}) out.push_back(b);
  out.insert(out.end(), kCounts.begin(), kCounts.end());
  for (std::uint8_t v = 0; v < 12; ++v) out.push_back(v);
  // SOS
  for (std::uint8_t b : {0xFF, 0xDA, 0x00, 0x08, 0x01, 0x01, 0x00, 0x00, 0x3F, 0x00}) out.push_back(b);
  const std::size_t scan = target > out.size() + 2 ? target - out.size() - 2 : 16;
  detail::fill(rng, Texture::HighCodes, out, scan);  // entropy data never contains 0xFF
  out.push_back(0xFF);
  out.push_back(0xD9);
  return out;
}

// ---- TIFF ----

void put_ifd_entry(Bytes& out, std::uint16_t tag, std::uint16_t type, std::uint32_t count, std::uint32_t value) {
  put_le16(out, tag);
  put_le16(out, type);
  put_le32(out, count);
  if (type == 3) {
    put_le16(out, static_cast<std::uint16_t>(value));
    put_le16(out, 0);
  } else {
    put_le32(out, value);
  }
}

Bytes make_tiff(Rng& rng, std::size_t target) {
  const auto width = static_cast<std::uint32_t>(rng.between(8, 64));
  const std::size_t ifd_size = 2 + 9 * 12 + 4;
  const std::size_t budget = target > 8 + ifd_size ? target - 8 - ifd_size : width;
  const auto rows = static_cast<std::uint32_t>(std::max<std::size_t>(1, budget / width));
  const std::uint32_t strip = width * rows;

  Bytes out = {'I', 'I', 42, 0};
  const std::uint32_t ifd = static_cast<std::uint32_t>(align_up(8 + strip, 2));
  put_le32(out, ifd);
  detail::fill(rng, Texture::MidBand, out, strip);
  out.resize(ifd, 0);
  put_le16(out, 9);
  put_ifd_entry(out, 256, 4, 1, width);
  put_ifd_entry(out, 257, 4, 1, rows);
  put_ifd_entry(out, 258, 3, 1, 8);
  put_ifd_entry(out, 259, 3, 1, 1);
  put_ifd_entry(out, 262, 3, 1, 1);
  put_ifd_entry(out, 273, 4, 1, 8);
  put_ifd_entry(out, 277, 3, 1, 1);
  put_ifd_entry(out, 278, 4, 1, rows);
  put_ifd_entry(out, 279, 4, 1, strip);
  put_le32(out, 0);
  return out;
}

// ---- DICOM (explicit VR little endian) ----

bool long_form(std::string_view vr) {
  return vr == "OB" || vr == "OW" || vr == "OF" || vr == "SQ" || vr == "UT" || vr == "UN";
}

void put_element(Bytes& out, std::uint16_t group, std::uint16_t element, std::string_view vr, ByteView value) {
  put_le16(out, group);
  put_le16(out, element);
  put_str(out, vr);
  if (long_form(vr)) {
    put_le16(out, 0);
    put_le32(out, static_cast<std::uint32_t>(value.size()));
  } else {
    put_le16(out, static_cast<std::uint16_t>(value.size()));
  }
  append(out, value);
}

Bytes padded(std::string_view s, std::uint8_t pad) {
  Bytes v(s.begin(), s.end());
  if (v.size() % 2 != 0) v.push_back(pad);
  return v;
}

Bytes make_dicom(Rng& rng, std::uint64_t seed, std::size_t target) {
  Bytes meta;
  put_element(meta, 0x0002, 0x0001, "OB", Bytes{0x00, 0x01});
  put_element(meta, 0x0002, 0x0002, "UI", padded("1.2.840.10008.5.1.4.1.1.7", 0));
  put_element(meta, 0x0002, 0x0003, "UI", padded("1.2.826.0.1.3680043.9." + std::to_string(seed % 1000000007), 0));
  put_element(meta, 0x0002, 0x0010, "UI", padded("1.2.840.10008.1.2.1", 0));

  Bytes out(kDicomPreamble, 0);
  put_str(out, "DICM");
  Bytes group_len;
  put_le32(group_len, static_cast<std::uint32_t>(meta.size()));
  put_element(out, 0x0002, 0x0000, "UL", group_len);
  append(out, meta);
  put_element(out, 0x0008, 0x0060, "CS", padded("OT", ' '));
  put_element(out, 0x0010, 0x0010, "PN", padded("ANON^" + std::to_string(seed % 100000), ' '));

  const auto cols = static_cast<std::uint16_t>(rng.between(8, 64));
  const std::size_t fixed = out.size() + 3 * 10 + 12;
  const std::size_t pixels_budget = target > fixed ? (target - fixed) / 2 : cols;
  const auto rows = static_cast<std::uint16_t>(std::clamp<std::size_t>(pixels_budget / cols, 1, 65535));
  Bytes v;
  put_le16(v, rows);
  put_element(out, 0x0028, 0x0010, "US", v);
  v.clear();
  put_le16(v, cols);
  put_element(out, 0x0028, 0x0011, "US", v);
  v.clear();
  put_le16(v, 16);
  put_element(out, 0x0028, 0x0100, "US", v);

  Bytes pixels;
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  pixels.reserve(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t r = rng.next();
    pixels.push_back(static_cast<std::uint8_t>(0x80 | (r >> 57)));
    pixels.push_back(static_cast<std::uint8_t>((r >> 20) & 0x03));
  }
  put_element(out, 0x7FE0, 0x0010, "OW", pixels);
  return out;
}

// ---- ISO 9660 ----

void put_both16(Bytes& b, std::size_t at, std::uint16_t v) {
  write_le16(b, at, v);
  write_be16(b, at + 2, v);
}

void put_both32(Bytes& b, std::size_t at, std::uint32_t v) {
  write_le32(b, at, v);
  for (int i = 0; i < 4; ++i) b[at + 4 + i] = static_cast<std::uint8_t>(v >> (8 * (3 - i)));
}

void fill_text(Bytes& b, std::size_t at, std::string_view s) {
  std::copy(s.begin(), s.end(), b.begin() + static_cast<std::ptrdiff_t>(at));
}

// Directory record of `name_len` + 33 bytes (padded even) at `at`.
std::size_t put_dir_record(Bytes& b, std::size_t at, std::uint32_t extent, std::uint32_t size, std::uint8_t flags,
                           std::string_view name) {
  const std::size_t len = align_up(33 + name.size(), 2);
  b[at] = static_cast<std::uint8_t>(len);
  put_both32(b, at + 2, extent);
  put_both32(b, at + 10, size);
  b[at + 18] = 124;  // 2024
  b[at + 19] = 1;
  b[at + 20] = 1;
  b[at + 25] = flags;
  put_both16(b, at + 28, 1);
  b[at + 32] = static_cast<std::uint8_t>(name.size());
  fill_text(b, at + 33, name);
  return len;
}

Bytes make_iso(Rng& rng, std::uint64_t seed, std::size_t target) {
  const std::size_t sectors = std::max<std::size_t>(17, align_up(target, kIsoSector) / kIsoSector);
  Bytes out(sectors * kIsoSector, 0);
  const std::size_t pvd = kIsoSystemArea;
  out[pvd] = 1;
  fill_text(out, pvd + 1, "CD001");
  out[pvd + 6] = 1;
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(pvd + 8), out.begin() + static_cast<std::ptrdiff_t>(pvd + 72),
            ' ');
  std::string volume = "DISC_" + std::to_string(seed % 100000000);
  fill_text(out, pvd + 40, volume);
  put_both32(out, pvd + 80, static_cast<std::uint32_t>(sectors));
  put_both16(out, pvd + 120, 1);
  put_both16(out, pvd + 124, 1);
  put_both16(out, pvd + 128, static_cast<std::uint16_t>(kIsoSector));
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(pvd + 190), out.begin() + static_cast<std::ptrdiff_t>(pvd + 813),
            ' ');
  out[pvd + 881] = 1;

  const bool has_root = sectors >= 19;
  const std::uint32_t root_extent = has_root ? 18 : 16;
  put_dir_record(out, pvd + 156, root_extent, static_cast<std::uint32_t>(kIsoSector), 0x02, std::string_view("\0", 1));

  if (sectors >= 18) {
    const std::size_t term = 17 * kIsoSector;
    out[term] = 255;
    fill_text(out, term + 1, "CD001");
    out[term + 6] = 1;
  }
  if (has_root) {
    const std::size_t dir = 18 * kIsoSector;
    std::size_t at = dir;
    at += put_dir_record(out, at, 18, static_cast<std::uint32_t>(kIsoSector), 0x02, std::string_view("\0", 1));
    at += put_dir_record(out, at, 18, static_cast<std::uint32_t>(kIsoSector), 0x02, std::string_view("\1", 1));
    const std::size_t data_sectors = sectors - 19;
    // file body: text lines, final sector partially zero-padded
    std::size_t body_len = 0;
    if (data_sectors > 0) {
      body_len = data_sectors * kIsoSector - rng.below(kIsoSector);
      std::size_t pos = 19 * kIsoSector;
      const std::size_t end = pos + body_len;
      while (pos < end) {
        std::string line = detail::words(rng, std::min<std::size_t>(end - pos, 72));
        line.push_back('\n');
        const std::size_t n = std::min(line.size(), end - pos);
        std::copy_n(line.begin(), n, out.begin() + static_cast<std::ptrdiff_t>(pos));
        pos += n;
      }
    }
    put_dir_record(out, at, data_sectors > 0 ? 19 : 0, static_cast<std::uint32_t>(body_len), 0x00, "README.TXT;1");
  }
  return out;
}

// ---- ZIP / JAR ----

Bytes make_zip(Rng& rng, std::size_t target, bool jar) {
  std::vector<zip::Entry> entries;
  std::size_t overhead = 22;
  if (jar) {
    std::string manifest = "Manifest-Version: 1.0\r\nCreated-By: 17.0.2 (Eclipse Adoptium)\r\nMain-Class: com.example.Main\r\n\r\n";
    entries.push_back({std::string(zip::kManifestName), Bytes(manifest.begin(), manifest.end())});
    overhead += 76 + 2 * zip::kManifestName.size() + manifest.size();
  }
  // Members stay below one JPEG segment so a parasite never has to split one.
  constexpr std::size_t kMaxMember = 60000;
  const std::size_t budget = target > overhead + 128 ? target - overhead : 128;
  const std::size_t count = (budget + kMaxMember - 1) / kMaxMember + rng.below(3);
  std::size_t remaining = budget;
  for (std::size_t i = 0; i < count; ++i) {
    std::string name = jar ? "com/example/C" + std::to_string(i) + ".class" : "data/file_" + std::to_string(i) + ".bin";
    const std::size_t header = 76 + 2 * name.size();
    const std::size_t left = count - i;
    std::size_t share = remaining / left;
    if (left > 1 && share > 16) share = share / 2 + rng.below(share);
    share = std::min(share, remaining);
    std::size_t size = share > header ? share - header : 1;
    size = std::min(size, kMaxMember);
    Bytes data;
    if (jar) data = {0xCA, 0xFE, 0xBA, 0xBE};
    detail::fill(rng, Texture::Uniform, data, size > data.size() ? size - data.size() : 0);
    remaining -= std::min(remaining, size + header);
    entries.push_back({std::move(name), std::move(data)});
  }
  return zip::build(entries);
}

// ---- PDF ----

Bytes make_pdf(Rng& rng, std::size_t target) {
  std::string content;
  const std::size_t budget = target > 700 ? target - 600 : 64;
  int y = 760;
  while (content.size() < budget) {
    std::string text = detail::words(rng, std::min<std::size_t>(64, budget - content.size() + 8));
    content += "BT /F1 12 Tf 72 " + std::to_string(y) + " Td (" + text + ") Tj ET\n";
    y = y > 40 ? y - 14 : 760;
  }
  pdf::Writer w;
  w.header("1.4");
  w.object(1, as_view("\n<< /Type /Catalog /Pages 2 0 R >>\n"));
  w.object(2, as_view("\n<< /Type /Pages /Kids [3 0 R] /Count 1 >>\n"));
  w.object(3, as_view("\n<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Resources << /Font << /F1 5 0 R >> >> "
                      "/Contents 4 0 R >>\n"));
  w.stream_object(4, "", as_view(content));
  w.object(5, as_view("\n<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>\n"));
  w.finish(1);
  return w.take();
}

}  // namespace

Bytes build_pe(std::uint64_t seed, std::size_t used_bytes, std::size_t raw_size) {
  Rng rng(seed);
  raw_size = align_up(std::max(raw_size, std::max<std::size_t>(used_bytes, 1)), kPeFileAlignment);
  Bytes out;
  // DOS header with e_lfanew = 0x40
  put_str(out, "MZ");
  out.resize(0x3C, 0);
  put_le32(out, 0x40);
  put_str(out, std::string_view("PE\0\0", 4));
  // COFF header
  put_le16(out, 0x014C);
  put_le16(out, 1);
  put_le32(out, static_cast<std::uint32_t>(0x60000000u + seed % 0x10000000u));
  put_le32(out, 0);
  put_le32(out, 0);
  put_le16(out, 224);
  put_le16(out, 0x0102);
  // PE32 optional header
  const std::size_t opt = out.size();
  const auto raw32 = static_cast<std::uint32_t>(raw_size);
  const std::uint32_t image_size = 0x1000 + static_cast<std::uint32_t>(align_up(std::max(used_bytes, raw_size), 0x1000));
  put_le16(out, 0x010B);
  out.push_back(14);
  out.push_back(0);
  put_le32(out, raw32);          // SizeOfCode
  put_le32(out, 0);              // SizeOfInitializedData
  put_le32(out, 0);              // SizeOfUninitializedData
  put_le32(out, 0x1000);         // AddressOfEntryPoint
  put_le32(out, 0x1000);         // BaseOfCode
  put_le32(out, 0x1000);         // BaseOfData
  put_le32(out, 0x00400000);     // ImageBase
  put_le32(out, 0x1000);         // SectionAlignment
  put_le32(out, static_cast<std::uint32_t>(kPeFileAlignment));
  put_le16(out, 6);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le16(out, 6);
  put_le16(out, 0);
  put_le32(out, 0);
  put_le32(out, image_size);
  put_le32(out, static_cast<std::uint32_t>(kPeFileAlignment));  // SizeOfHeaders
  put_le32(out, 0);                                               // CheckSum
  put_le16(out, 3);                                               // console subsystem
  put_le16(out, 0x8140);
  put_le32(out, 0x100000);
  put_le32(out, 0x1000);
  put_le32(out, 0x100000);
  put_le32(out, 0x1000);
  put_le32(out, 0);
  put_le32(out, 16);
  out.resize(opt + 224, 0);  // empty data directories
  // section table
  const char name[8] = {'.', 't', 'e', 'x', 't', 0, 0, 0};
  out.insert(out.end(), name, name + 8);
  put_le32(out, static_cast<std::uint32_t>(used_bytes));  // VirtualSize
  put_le32(out, 0x1000);
  put_le32(out, raw32);
  put_le32(out, static_cast<std::uint32_t>(kPeFileAlignment));
  put_le32(out, 0);
  put_le32(out, 0);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le32(out, 0x60000020);
  out.resize(kPeFileAlignment, 0);
  // code: entry ends in a non-zero byte so the used region is unambiguous
  Bytes code;
  detail::fill(rng, Texture::Code, code, used_bytes);
  if (!code.empty()) code.back() = 0xC3;
  append(out, code);
  out.resize(kPeFileAlignment + raw_size, 0);
  return out;
}

SizeBounds size_bounds(FileType type) {
  constexpr std::size_t kMax = std::size_t{64} << 20;
  switch (type) {
    case FileType::PDF: return {512, kMax};
    case FileType::PNG: return {128, kMax};
    case FileType::GIF: return {64, kMax};
    case FileType::JPG: return {192, kMax};
    case FileType::TIFF: return {160, kMax};
    case FileType::ZIP: return {128, kMax};
    case FileType::JAR: return {256, kMax};
    case FileType::DCM: return {512, kMax};
    case FileType::ISO: return {kIsoMinSize, kMax};
    case FileType::PE: return {1024, kMax};
  }
  return {0, 0};
}

FileArtifact generate_monoglot(FileType type, std::uint64_t seed, std::size_t payload_size) {
  const SizeBounds b = size_bounds(type);
  if (payload_size < b.min || payload_size > b.max) {
    throw Error(ErrorCode::UnsupportedSize, std::string(name_of(type)) + " payload_size " +
                                                std::to_string(payload_size) + " outside [" + std::to_string(b.min) +
                                                ", " + std::to_string(b.max) + "]");
  }
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(type) + 1));
  FileArtifact a;
  a.declared_types = {type};
  a.seed = seed;
  switch (type) {
    case FileType::PDF: a.bytes = make_pdf(rng, payload_size); break;
    case FileType::PNG: a.bytes = make_png(rng, payload_size); break;
    case FileType::GIF: a.bytes = make_gif(rng, payload_size); break;
    case FileType::JPG: a.bytes = make_jpg(rng, payload_size); break;
    case FileType::TIFF: a.bytes = make_tiff(rng, payload_size); break;
    case FileType::ZIP: a.bytes = make_zip(rng, payload_size, false); break;
    case FileType::JAR: a.bytes = make_zip(rng, payload_size, true); break;
    case FileType::DCM: a.bytes = make_dicom(rng, seed, payload_size); break;
    case FileType::ISO: a.bytes = make_iso(rng, seed, payload_size); break;
    case FileType::PE: {
      const std::size_t raw = align_up(payload_size - kPeFileAlignment, kPeFileAlignment);
      const std::size_t used = std::max<std::size_t>(16, raw * rng.between(30, 90) / 100);
      a.bytes = build_pe(rng.next(), used, raw);
      break;
    }
  }
  return a;
}

}  // namespace codecs
}  // namespace polyglot
