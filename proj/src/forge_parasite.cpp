// Guests carried inside the host's own comment containers.

#include <algorithm>
#include <charconv>
#include <set>

#include "polyglot/codecs.hpp"
#include "forge_detail.hpp"

namespace polyglot::forge::detail {

namespace {

// Sub-block layout for a deflate stored block threaded through GIF comment
// sub-blocks. The sub-block length byte is also the block header byte: a
// value that is 0 mod 8 reads as "stored, not final" and 1 mod 8 as "stored,
// final". Full blocks carry 244 bytes so their length byte is 248.
constexpr std::size_t kThreadChunk = 244;
constexpr std::size_t kThreadFinalMax = 245;
constexpr std::size_t kGifNameMax = 200;

std::size_t threaded_size(std::size_t n) {
  std::size_t blocks = 1;
  while (n > kThreadFinalMax) {
    n -= kThreadChunk;
    ++blocks;
  }
  return blocks;
}

void put_stored_header(Bytes& out, std::size_t len) {
  put_le16(out, static_cast<std::uint16_t>(len));
  put_le16(out, static_cast<std::uint16_t>(~len));
}

}  // namespace

Bytes parasite_png(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups) {
  const auto at = codecs::png_after_ihdr(host.bytes);
  if (!at) fail(ErrorCode::InapplicableRecipe, "host has no IHDR chunk");
  if (guest.bytes.size() > 0x7FFFFFFFu) fail(ErrorCode::GuestTooLarge, "guest exceeds a PNG chunk");
  const auto a = archive_of(guest);

  Bytes out(host.bytes.begin(), host.bytes.begin() + static_cast<std::ptrdiff_t>(*at));
  put_be32(out, static_cast<std::uint32_t>(guest.bytes.size()));
  const std::size_t type_at = out.size();
  put_str(out, "poLy");
  const std::size_t data_at = out.size();
  append(out, guest.bytes);
  shift_archive(out, data_at, a, static_cast<std::int64_t>(data_at), fixups);
  put_be32(out, crc32(ByteView(out).subspan(type_at)));
  append(out, ByteView(host.bytes).subspan(*at));
  return out;
}

Bytes parasite_gif(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups) {
  const auto at = codecs::gif_blocks_offset(host.bytes);
  if (!at) fail(ErrorCode::InapplicableRecipe, "host has no GIF header");
  const auto a = archive_of(guest);
  if (a.entries.size() > 0xFFFF) fail(ErrorCode::GuestTooLarge, "too many members");

  // The archive is re-encoded so each member is a deflate stream of stored
  // blocks whose headers double as sub-block lengths. Central records carry
  // a one-byte comment that is the length of the next sub-block.
  struct Member {
    const zip::CentralRecord* record;
    Bytes data;
    std::uint32_t crc;
    std::size_t compressed;
    std::size_t local_at;
  };
  std::vector<Member> members;
  for (const auto& r : a.entries) {
    if (r.name.size() > kGifNameMax) fail(ErrorCode::GuestTooLarge, "member name too long for a sub-block");
    auto data = zip::extract(guest.bytes, r);
    if (!data) fail(ErrorCode::InapplicableRecipe, "guest member " + r.name + " is unreadable");
    const std::size_t compressed = data->size() + 5 * threaded_size(data->size());
    if (compressed > 0xFFFFFFFFu) fail(ErrorCode::GuestTooLarge, "member too large");
    members.push_back({&r, std::move(*data), r.crc, compressed, 0});
  }

  Bytes out(host.bytes.begin(), host.bytes.begin() + static_cast<std::ptrdiff_t>(*at));
  out.push_back(0x21);
  out.push_back(0xFE);
  for (auto& m : members) {
    const auto& name = m.record->name;
    out.push_back(static_cast<std::uint8_t>(zip::kLocalHeaderSize + name.size()));
    m.local_at = out.size();
    zip::write_local_header(out, name, zip::kDeflated, m.crc, static_cast<std::uint32_t>(m.compressed),
                            static_cast<std::uint32_t>(m.data.size()));
    std::size_t pos = 0;
    std::size_t left = m.data.size();
    const auto chunk = [&](std::size_t n) {
      put_stored_header(out, n);
      out.insert(out.end(), m.data.begin() + static_cast<std::ptrdiff_t>(pos),
                 m.data.begin() + static_cast<std::ptrdiff_t>(pos + n));
      pos += n;
      left -= n;
    };
    while (left > kThreadFinalMax) {
      out.push_back(static_cast<std::uint8_t>(4 + kThreadChunk));
      chunk(kThreadChunk);
    }
    const std::size_t last = left;
    const std::size_t gap = (8 + 1 - (4 + last) % 8) % 8;
    out.push_back(static_cast<std::uint8_t>(4 + last + gap));
    chunk(last);
    out.insert(out.end(), gap, 0);
  }

  out.push_back(static_cast<std::uint8_t>(zip::kCentralHeaderSize + members.front().record->name.size()));
  const std::size_t cd_at = out.size();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    const std::uint8_t next = i + 1 < members.size()
                                  ? static_cast<std::uint8_t>(zip::kCentralHeaderSize + members[i + 1].record->name.size())
                                  : static_cast<std::uint8_t>(zip::kEocdSize);
    const Bytes comment{next};
    if (m.local_at > 0xFFFFFFFFu) fail(ErrorCode::FixupOverflow, "local header offset");
    zip::write_central_record(out, m.record->name, zip::kDeflated, m.crc, static_cast<std::uint32_t>(m.compressed),
                              static_cast<std::uint32_t>(m.data.size()), static_cast<std::uint32_t>(m.local_at),
                              comment);
  }
  const std::size_t cd_size = out.size() - cd_at;
  if (cd_at > 0xFFFFFFFFu) fail(ErrorCode::FixupOverflow, "central directory offset");
  const std::size_t eocd_at = out.size();
  zip::write_eocd(out, static_cast<std::uint16_t>(members.size()), static_cast<std::uint32_t>(cd_size),
                  static_cast<std::uint32_t>(cd_at));
  out.push_back(0x00);

  const auto placed = zip::parse_at(out, eocd_at);
  if (!placed) fail(ErrorCode::InapplicableRecipe, "re-encoded archive did not parse");
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& r = placed->entries[i];
    const auto before = static_cast<std::int64_t>(members[i].record->local_offset);
    fixups.push_back({r.local_offset_field, 4, static_cast<std::int64_t>(r.local_offset) - before,
                      "central record offset of " + r.name});
  }
  fixups.push_back({placed->cd_offset_field, 4,
                    static_cast<std::int64_t>(cd_at) - static_cast<std::int64_t>(a.cd_offset),
                    "central directory offset"});
  append(out, ByteView(host.bytes).subspan(*at));
  return out;
}

Bytes parasite_jpg(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups) {
  constexpr std::size_t kSegmentMax = 65533;
  const auto at = codecs::jpg_insertion_offset(host.bytes);
  if (!at) fail(ErrorCode::InapplicableRecipe, "host has no JPEG start marker");
  const auto a = archive_of(guest);

  // Records never straddle two segments: the marker bytes between segments
  // would otherwise land inside a header or member data.
  std::set<std::size_t> cuts{0, a.cd_offset};
  for (const auto& r : a.entries) cuts.insert(r.local_offset);
  cuts.insert(guest.bytes.size());
  std::vector<std::size_t> points(cuts.begin(), cuts.end());

  std::vector<std::pair<std::size_t, std::size_t>> segments;  // [begin, end) in guest
  std::size_t begin = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] - points[i - 1] > kSegmentMax)
      fail(ErrorCode::GuestTooLarge, "archive record exceeds one comment segment");
    if (points[i] - begin > kSegmentMax) {
      segments.emplace_back(begin, points[i - 1]);
      begin = points[i - 1];
    }
  }
  if (begin < guest.bytes.size()) segments.emplace_back(begin, guest.bytes.size());

  Bytes out(host.bytes.begin(), host.bytes.begin() + static_cast<std::ptrdiff_t>(*at));
  std::vector<std::pair<std::size_t, std::size_t>> moved;  // guest segment begin -> output position
  for (const auto& [b, e] : segments) {
    out.push_back(0xFF);
    out.push_back(0xFE);
    put_be16(out, static_cast<std::uint16_t>(e - b + 2));
    moved.emplace_back(b, out.size());
    out.insert(out.end(), guest.bytes.begin() + static_cast<std::ptrdiff_t>(b),
               guest.bytes.begin() + static_cast<std::ptrdiff_t>(e));
  }
  const auto where = [&](std::size_t guest_pos) {
    auto it = std::upper_bound(moved.begin(), moved.end(), std::make_pair(guest_pos, npos));
    --it;
    return it->second + (guest_pos - it->first);
  };
  for (const auto& r : a.entries)
    patch_offset(out, where(r.local_offset_field), r.local_offset, static_cast<std::int64_t>(where(r.local_offset)),
                 "central record offset of " + r.name, fixups);
  patch_offset(out, where(a.cd_offset_field), static_cast<std::int64_t>(a.cd_offset),
               static_cast<std::int64_t>(where(a.cd_offset)), "central directory offset", fixups);
  append(out, ByteView(host.bytes).subspan(*at));
  return out;
}

Bytes parasite_pdf(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups) {
  const auto doc = pdf::parse(host.bytes);
  if (!doc) fail(ErrorCode::InapplicableRecipe, "host PDF does not parse");
  const auto a = archive_of(guest);
  const int carrier = doc->max_object_number() + 1;

  pdf::Writer w;
  w.header(doc->version);
  w.mark_object(carrier);
  w.raw(std::to_string(carrier) + " 0 obj\n<< /Length " + std::to_string(guest.bytes.size()) + " >>\nstream\n");
  const std::size_t data_at = w.position();
  w.raw(guest.bytes);
  w.raw("\nendstream\nendobj\n");
  for (const auto& o : doc->objects) w.object(o.number, o.body);
  w.finish(doc->root);
  record_xref(*doc, w, 0, fixups);

  const std::size_t sx = rfind(ByteView(host.bytes), "startxref");
  std::size_t old_xref = 0;
  {
    std::size_t p = sx + 9;
    while (p < host.bytes.size() && (host.bytes[p] == '\r' || host.bytes[p] == '\n' || host.bytes[p] == ' ')) ++p;
    const char* s = reinterpret_cast<const char*>(host.bytes.data());
    std::from_chars(s + p, s + host.bytes.size(), old_xref);
  }
  const auto delta = static_cast<std::int64_t>(w.xref_offset()) - static_cast<std::int64_t>(old_xref);
  if (delta != 0)
    fixups.push_back({w.startxref_field(), std::to_string(w.xref_offset()).size(), delta, "startxref"});

  Bytes out = w.take();
  shift_archive(out, data_at, a, static_cast<std::int64_t>(data_at), fixups);
  return out;
}

}  // namespace polyglot::forge::detail
