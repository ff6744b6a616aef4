// DICOM hosts interleaved with a GIF or PDF guest. Both formats tolerate a
// free-form 128-byte preamble at the front of the DICOM file, and DICOM
// tolerates a trailing private element after the pixel data, so the guest's
// head lives in the preamble and its tail in the private element.

#include <cstdio>

#include "polyglot/codecs.hpp"
#include "forge_detail.hpp"

namespace polyglot::forge::detail {

namespace {

constexpr std::size_t kPrivateHeader = 12;
constexpr std::size_t kGifLastChunk = 255 - kPrivateHeader - 1;  // one byte kept for padding

codecs::DicomLayout layout_of(const FileArtifact& host) {
  const auto l = codecs::dicom_layout(host.bytes);
  if (!l) fail(ErrorCode::InapplicableRecipe, "host DICOM does not parse");
  if (l->pixel_value_offset + l->pixel_value_length != host.bytes.size())
    fail(ErrorCode::InapplicableRecipe, "host has elements after the pixel data");
  return *l;
}

void put_private_header(Bytes& out, std::size_t value_length) {
  put_le16(out, 0x7FE1);
  put_le16(out, 0x1000);
  put_str(out, "OB");
  put_le16(out, 0);
  put_le32(out, static_cast<std::uint32_t>(value_length));
}

}  // namespace

Bytes zipper_dicom_gif(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups) {
  const auto l = layout_of(host);
  const auto head = codecs::gif_blocks_offset(guest.bytes);
  if (!head) fail(ErrorCode::InapplicableRecipe, "guest has no GIF header");
  const ByteView h(host.bytes);
  const ByteView g(guest.bytes);

  // Preamble: GIF head, a comment extension, then filler sub-blocks so that
  // the sub-block entering the DICOM body starts as late as possible.
  Bytes out(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(*head));
  out.push_back(0x21);
  out.push_back(0xFE);
  if (out.size() + 1 > codecs::kDicomPreamble) fail(ErrorCode::GuestTooLarge, "GIF head exceeds the preamble");
  std::size_t room = codecs::kDicomPreamble - 1 - out.size();
  std::size_t entry = codecs::kDicomPreamble - 1;
  if (room == 1) {
    room = 0;
    entry = out.size();
  }
  if (room > 0) {
    out.push_back(static_cast<std::uint8_t>(room - 1));
    out.insert(out.end(), h.begin() + static_cast<std::ptrdiff_t>(out.size()),
               h.begin() + static_cast<std::ptrdiff_t>(entry));
  }
  const std::size_t first = l.pixel_value_offset - entry - 1;
  if (first > 255) fail(ErrorCode::GuestTooLarge, "DICOM header exceeds one GIF sub-block");
  out.push_back(static_cast<std::uint8_t>(first));
  out.insert(out.end(), h.begin() + static_cast<std::ptrdiff_t>(entry + 1),
             h.begin() + static_cast<std::ptrdiff_t>(l.pixel_value_offset));

  // Pixel data is split into sub-blocks; the last one also swallows the
  // private element header so the GIF stream resumes inside its value.
  const ByteView pixels = h.subspan(l.pixel_value_offset, l.pixel_value_length);
  std::size_t pos = 0;
  while (pixels.size() - pos > kGifLastChunk) {
    const std::size_t n = std::min<std::size_t>(255, pixels.size() - pos);
    out.push_back(static_cast<std::uint8_t>(n));
    append(out, pixels.subspan(pos, n));
    pos += n;
  }
  const std::size_t tail = pixels.size() - pos;
  const std::size_t value_so_far = out.size() - l.pixel_value_offset + 1 + tail;
  const std::size_t pad = value_so_far % 2;
  out.push_back(static_cast<std::uint8_t>(tail + pad + kPrivateHeader));
  append(out, pixels.subspan(pos));
  out.insert(out.end(), pad, 0);
  const std::size_t new_length = out.size() - l.pixel_value_offset;
  patch_offset(out, l.pixel_length_field, static_cast<std::int64_t>(l.pixel_value_length),
               static_cast<std::int64_t>(new_length), "pixel data length", fixups);

  Bytes value{0x00};  // ends the comment extension
  append(value, g.subspan(*head));
  if (value.size() % 2) value.push_back(0);
  put_private_header(out, value.size());
  append(out, value);
  return out;
}

Bytes zipper_dicom_pdf(const FileArtifact& host, const FileArtifact& guest, std::vector<OffsetFixup>& fixups) {
  layout_of(host);
  const auto doc = pdf::parse(guest.bytes);
  if (!doc) fail(ErrorCode::InapplicableRecipe, "guest PDF does not parse");
  const int carrier = doc->max_object_number() + 1;
  const ByteView h(host.bytes);

  // The DICOM body from the end of the opening line onward becomes the
  // content of a PDF stream object; the stream is closed inside a trailing
  // private element that carries the rest of the document.
  pdf::Writer w;
  w.header(doc->version);
  w.mark_object(carrier);
  w.raw(std::to_string(carrier) + " 0 obj\n<< /Length ");
  const std::size_t length_at = w.position();
  w.raw("0000000000 >>\nstream\n");
  const std::size_t content_at = w.position();
  if (content_at > codecs::kDicomPreamble) fail(ErrorCode::GuestTooLarge, "PDF opening exceeds the preamble");
  w.raw(h.subspan(content_at));
  const std::size_t private_at = w.position();
  w.raw(Bytes(kPrivateHeader, 0));
  const std::size_t value_at = w.position();
  w.raw("\nendstream\nendobj\n");
  for (const auto& o : doc->objects) w.object(o.number, o.body);
  w.finish(doc->root);
  record_xref(*doc, w, 0, fixups);
  if (w.position() % 2) w.raw("\n");

  Bytes out = w.take();
  char digits[16];
  std::snprintf(digits, sizeof digits, "%010zu", value_at - content_at);
  std::copy(digits, digits + 10, out.begin() + static_cast<std::ptrdiff_t>(length_at));
  Bytes header;
  put_private_header(header, out.size() - value_at);
  std::copy(header.begin(), header.end(), out.begin() + static_cast<std::ptrdiff_t>(private_at));
  return out;
}

}  // namespace polyglot::forge::detail
