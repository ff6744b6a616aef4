#include "polyglot/pdf.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace polyglot::pdf {

namespace {

bool is_ws(std::uint8_t c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == 0; }
bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }

std::size_t skip_ws(ByteView b, std::size_t at) {
  while (at < b.size() && is_ws(b[at])) ++at;
  return at;
}

// Parses a non-negative decimal at `at`; advances `at` past it.
std::optional<std::size_t> read_uint(ByteView b, std::size_t& at, std::size_t max_digits = 12) {
  std::size_t v = 0;
  std::size_t n = 0;
  while (at < b.size() && is_digit(b[at]) && n < max_digits) {
    v = v * 10 + (b[at] - '0');
    ++at;
    ++n;
  }
  if (n == 0 || (at < b.size() && is_digit(b[at]))) return std::nullopt;
  return v;
}

bool keyword_at(ByteView b, std::size_t at, std::string_view kw) { return starts_with_at(b, at, kw); }

// Locates the "stream" keyword belonging to an object body in [from, to).
std::size_t stream_keyword(ByteView b, std::size_t from, std::size_t to) {
  std::size_t at = from;
  while (true) {
    at = find(b, "stream", at);
    if (at == npos || at >= to) return npos;
    const bool before_ok = at > 0 && (is_ws(b[at - 1]) || b[at - 1] == '>');
    const bool after_ok = at + 6 < b.size() && (b[at + 6] == '\n' || b[at + 6] == '\r');
    if (before_ok && after_ok) return at;
    at += 6;
  }
}

struct ObjectSpan {
  std::size_t body_begin;
  std::size_t body_end;
};

std::optional<ObjectSpan> parse_object(ByteView b, std::size_t at, std::size_t number) {
  auto num = read_uint(b, at);
  if (!num || *num != number) return std::nullopt;
  if (at >= b.size() || !is_ws(b[at])) return std::nullopt;
  at = skip_ws(b, at);
  if (!read_uint(b, at)) return std::nullopt;
  at = skip_ws(b, at);
  if (!keyword_at(b, at, "obj")) return std::nullopt;
  const std::size_t body_begin = at + 3;

  std::size_t endobj = find(b, "endobj", body_begin);
  if (endobj == npos) return std::nullopt;
  const std::size_t kw = stream_keyword(b, body_begin, endobj);
  if (kw != npos) {
    std::size_t data = kw + 6;
    if (b[data] == '\r' && data + 1 < b.size() && b[data + 1] == '\n') ++data;
    ++data;
    std::size_t len_at = find(b, "/Length", body_begin);
    if (len_at == npos || len_at > kw) return std::nullopt;
    len_at = skip_ws(b, len_at + 7);
    auto length = read_uint(b, len_at);
    if (!length) return std::nullopt;
    std::size_t probe = skip_ws(b, len_at);
    const bool indirect = probe < b.size() && is_digit(b[probe]);
    std::size_t end_kw;
    if (indirect) {
      end_kw = find(b, "endstream", data);
    } else {
      if (!fits(b, data, *length)) return std::nullopt;
      end_kw = data + *length;
      if (end_kw < b.size() && b[end_kw] == '\r') ++end_kw;
      if (end_kw < b.size() && b[end_kw] == '\n') ++end_kw;
      if (!keyword_at(b, end_kw, "endstream")) return std::nullopt;
    }
    if (end_kw == npos) return std::nullopt;
    endobj = find(b, "endobj", end_kw + 9);
    if (endobj == npos) return std::nullopt;
  }
  return ObjectSpan{body_begin, endobj};
}

}  // namespace

int Document::max_object_number() const {
  int m = 0;
  for (const auto& o : objects) m = std::max(m, o.number);
  return m;
}

std::optional<Document> parse(ByteView b) {
  Document doc;
  const std::size_t window = std::min(b.size(), kHeaderWindow + 4);
  doc.header_offset = find(b.first(window), "%PDF-");
  if (doc.header_offset == npos || doc.header_offset >= kHeaderWindow) return std::nullopt;
  std::size_t at = doc.header_offset + 5;
  if (!fits(b, at, 3) || !is_digit(b[at]) || b[at + 1] != '.' || !is_digit(b[at + 2])) return std::nullopt;
  doc.version.assign(reinterpret_cast<const char*>(b.data() + at), 3);

  const std::size_t sx = rfind(b, "startxref");
  if (sx == npos || sx < doc.header_offset) return std::nullopt;
  at = skip_ws(b, sx + 9);
  auto xref = read_uint(b, at);
  if (!xref) return std::nullopt;
  at = skip_ws(b, at);
  if (!keyword_at(b, at, "%%EOF")) return std::nullopt;
  if (*xref >= b.size() || !keyword_at(b, *xref, "xref")) return std::nullopt;

  // Cross-reference subsections.
  std::map<std::size_t, std::size_t> in_use;
  at = skip_ws(b, *xref + 4);
  while (!keyword_at(b, at, "trailer")) {
    auto first = read_uint(b, at);
    if (!first || at >= b.size() || b[at] != ' ') return std::nullopt;
    ++at;
    auto count = read_uint(b, at);
    if (!count) return std::nullopt;
    at = skip_ws(b, at);
    if (*count > b.size() / 20 || !fits(b, at, *count * 20)) return std::nullopt;
    for (std::size_t i = 0; i < *count; ++i) {
      std::size_t e = at + i * 20;
      std::size_t p = e;
      auto offset = read_uint(b, p, 10);
      if (!offset || p != e + 10 || b[p] != ' ') return std::nullopt;
      const std::uint8_t kind = b[e + 17];
      if (kind == 'n') {
        in_use[*first + i] = *offset;
      } else if (kind != 'f') {
        return std::nullopt;
      }
    }
    at = skip_ws(b, at + *count * 20);
    if (at >= b.size()) return std::nullopt;
  }
  if (in_use.empty()) return std::nullopt;

  const std::size_t root_at = find(b, "/Root", at);
  if (root_at == npos || root_at > sx) return std::nullopt;
  std::size_t p = skip_ws(b, root_at + 5);
  auto root = read_uint(b, p);
  if (!root || !in_use.count(*root)) return std::nullopt;
  doc.root = static_cast<int>(*root);

  for (const auto& [number, offset] : in_use) {
    if (offset >= b.size()) return std::nullopt;
    auto span = parse_object(b, offset, number);
    if (!span) return std::nullopt;
    Object obj;
    obj.number = static_cast<int>(number);
    obj.offset = offset;
    obj.body.assign(b.begin() + static_cast<std::ptrdiff_t>(span->body_begin),
                    b.begin() + static_cast<std::ptrdiff_t>(span->body_end));
    doc.objects.push_back(std::move(obj));
  }
  return doc;
}

void Writer::header(std::string_view version) {
  raw("%PDF-");
  raw(version);
  raw("\n");
}

void Writer::mark_object(int number) { offsets_.emplace_back(number, position()); }

void Writer::object(int number, ByteView body) {
  mark_object(number);
  raw(std::to_string(number) + " 0 obj");
  raw(body);
  raw("endobj\n");
}

void Writer::stream_object(int number, std::string_view extra_dict, ByteView content) {
  mark_object(number);
  raw(std::to_string(number) + " 0 obj\n<< /Length " + std::to_string(content.size()));
  if (!extra_dict.empty()) {
    raw(" ");
    raw(extra_dict);
  }
  raw(" >>\nstream\n");
  raw(content);
  raw("\nendstream\nendobj\n");
}

void Writer::finish(int root) {
  std::map<int, std::size_t> table(offsets_.begin(), offsets_.end());
  const int size = table.empty() ? 1 : table.rbegin()->first + 1;
  xref_offset_ = position();
  raw("xref\n0 " + std::to_string(size) + "\n");
  char line[32];
  for (int n = 0; n < size; ++n) {
    auto it = table.find(n);
    if (it == table.end()) {
      raw(n == 0 ? "0000000000 65535 f \n" : "0000000000 00000 f \n");
      continue;
    }
    xref_fields_.emplace_back(n, position());
    std::snprintf(line, sizeof line, "%010zu 00000 n \n", it->second);
    raw(std::string_view(line, 20));
  }
  raw("trailer\n<< /Size " + std::to_string(size) + " /Root " + std::to_string(root) + " 0 R >>\nstartxref\n");
  startxref_field_ = position();
  raw(std::to_string(xref_offset_) + "\n%%EOF\n");
}

}  // namespace polyglot::pdf
