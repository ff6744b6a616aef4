#include <cctype>
#include <map>
#include <set>

#include "polyglot/codecs.hpp"
#include "polyglot/forge.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/zip.hpp"

namespace polyglot::forge {

namespace {

using Out = std::optional<Bytes>;

void put_chunk(Bytes& out, ByteView tag, ByteView data) {
  append(out, tag);
  put_le32(out, static_cast<std::uint32_t>(data.size()));
  append(out, data);
}

Out archive_content(ByteView b) {
  auto a = zip::parse(b);
  if (!a) return std::nullopt;
  Bytes out;
  for (const auto& r : a->entries) {
    auto data = zip::extract(b, r);
    if (!data) return std::nullopt;
    put_chunk(out, as_view(r.name), *data);
  }
  return out;
}

// Concatenated payload of a GIF sub-block chain starting at `at`.
std::optional<Bytes> sub_blocks(ByteView b, std::size_t& at) {
  Bytes data;
  while (true) {
    if (at >= b.size()) return std::nullopt;
    const std::size_t n = b[at++];
    if (n == 0) return data;
    if (!fits(b, at, n)) return std::nullopt;
    append(data, b.subspan(at, n));
    at += n;
  }
}

Out gif_content(ByteView b) {
  auto at = codecs::gif_blocks_offset(b);
  if (!at) return std::nullopt;
  Bytes out(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(*at));
  std::size_t p = *at;
  while (p < b.size()) {
    const std::uint8_t kind = b[p];
    if (kind == 0x3B) {
      out.push_back(kind);
      return out;
    }
    if (kind == 0x21) {
      if (!fits(b, p, 2)) return std::nullopt;
      const std::uint8_t label = b[p + 1];
      p += 2;
      auto data = sub_blocks(b, p);
      if (!data) return std::nullopt;
      if (label != 0xFE) {  // comments carry no image content
        out.push_back(0x21);
        out.push_back(label);
        put_chunk(out, {}, *data);
      }
      continue;
    }
    if (kind != 0x2C || !fits(b, p, 11)) return std::nullopt;
    std::size_t head = 10;
    if (b[p + 9] & 0x80) head += 3u * (2u << (b[p + 9] & 7));
    if (!fits(b, p, head + 1)) return std::nullopt;
    append(out, b.subspan(p, head + 1));
    p += head + 1;
    auto data = sub_blocks(b, p);
    if (!data) return std::nullopt;
    put_chunk(out, {}, *data);
  }
  return std::nullopt;
}

Out png_content(ByteView b) {
  if (!codecs::png_after_ihdr(b)) return std::nullopt;
  Bytes out;
  std::size_t p = 8;
  while (fits(b, p, 12)) {
    const std::size_t n = read_be32(b, p);
    if (!fits(b, p + 8, n + 4)) return std::nullopt;
    const ByteView type = b.subspan(p + 4, 4);
    if (std::isupper(type[0])) put_chunk(out, type, b.subspan(p + 8, n));
    if (starts_with_at(b, p + 4, "IEND")) return out;
    p += 12 + n;
  }
  return std::nullopt;
}

Out jpg_content(ByteView b) {
  if (!fits(b, 0, 2) || b[0] != 0xFF || b[1] != 0xD8) return std::nullopt;
  Bytes out{0xFF, 0xD8};
  std::size_t p = 2;
  while (fits(b, p, 2)) {
    if (b[p] != 0xFF) return std::nullopt;
    const std::uint8_t m = b[p + 1];
    if (m == 0xD9) {
      out.push_back(0xFF);
      out.push_back(m);
      return out;
    }
    if (!fits(b, p + 2, 2)) return std::nullopt;
    const std::size_t len = read_be16(b, p + 2);
    if (len < 2 || !fits(b, p + 2, len)) return std::nullopt;
    if (m != 0xFE) put_chunk(out, b.subspan(p + 1, 1), b.subspan(p + 4, len - 2));
    p += 2 + len;
    if (m == 0xDA) {
      const std::size_t start = p;
      while (fits(b, p, 2) && !(b[p] == 0xFF && b[p + 1] != 0x00 && (b[p + 1] < 0xD0 || b[p + 1] > 0xD7))) ++p;
      put_chunk(out, {}, b.subspan(start, p - start));
    }
  }
  return std::nullopt;
}

std::set<int> references(ByteView body) {
  std::set<int> refs;
  const std::string_view s(reinterpret_cast<const char*>(body.data()), body.size());
  for (std::size_t i = s.find(" 0 R"); i != std::string_view::npos; i = s.find(" 0 R", i + 1)) {
    std::size_t j = i;
    while (j > 0 && std::isdigit(static_cast<unsigned char>(s[j - 1]))) --j;
    if (j < i) refs.insert(std::stoi(std::string(s.substr(j, i - j))));
  }
  return refs;
}

Out pdf_content(ByteView b) {
  const auto doc = pdf::parse(b);
  if (!doc) return std::nullopt;
  std::map<int, const pdf::Object*> by_number;
  for (const auto& o : doc->objects) by_number[o.number] = &o;
  std::set<int> seen;
  std::vector<int> todo{doc->root};
  while (!todo.empty()) {
    const int n = todo.back();
    todo.pop_back();
    auto it = by_number.find(n);
    if (it == by_number.end() || !seen.insert(n).second) continue;
    for (int r : references(it->second->body)) todo.push_back(r);
  }
  Bytes out;
  for (int n : seen) put_chunk(out, as_view(std::to_string(n)), by_number[n]->body);
  return out;
}

}  // namespace

std::optional<Bytes> logical_content(ByteView bytes, FileType type) {
  switch (type) {
    case FileType::ZIP:
    case FileType::JAR: return archive_content(bytes);
    case FileType::GIF: return gif_content(bytes);
    case FileType::PNG: return png_content(bytes);
    case FileType::JPG: return jpg_content(bytes);
    case FileType::PDF: return pdf_content(bytes);
    default:
      if (!codecs::validate(bytes, type)) return std::nullopt;
      return Bytes(bytes.begin(), bytes.end());
  }
}

}  // namespace polyglot::forge
