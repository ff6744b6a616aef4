#include "polyglot/codecs.hpp"

#include <algorithm>
#include <array>

#include "polyglot/error.hpp"

namespace polyglot::codecs {

namespace {

constexpr std::array<Capabilities, kFileTypeCount> kCapabilities = {{
    // magic@0, window, comment, max comment payload, cavity host
    {false, 1024, true, kUnlimited, false},                   // PDF: stream objects
    {true, 1, true, 0x7FFFFFFF, false},                       // PNG: ancillary chunk
    {true, 1, true, 255, false},                              // GIF: comment sub-block
    {true, 1, true, 65533, false},                            // JPG: COM segment
    {true, 1, false, 0, false},                               // TIFF
    {false, kUnlimited, true, 65535, false},                  // ZIP: archive comment
    {false, kUnlimited, true, 65535, false},                  // JAR
    {false, kDicomPreamble + 4, true, 0xFFFFFFFE, false},     // DCM: private element
    {false, kIsoSystemArea + 6, false, 0, true},              // ISO
    {true, 1, false, 0, true},                                // PE
}};

// The zero run that ends at `end`, looking no further back than `begin`.
Span trailing_zero_run(ByteView b, std::size_t begin, std::size_t end) {
  std::size_t start = end;
  while (start > begin && b[start - 1] == 0) --start;
  return {start, end - start};
}

}  // namespace

const Capabilities& capabilities(FileType type) { return kCapabilities[static_cast<std::size_t>(type)]; }

std::vector<Span> locate_cavities(ByteView bytes, FileType type) {
  if (!capabilities(type).cavity_host) {
    throw Error(ErrorCode::NotACavityHost, std::string(name_of(type)) + " has no null-padded regions");
  }
  std::vector<Span> spans;
  if (type == FileType::ISO) {
    if (bytes.size() < kIsoSystemArea) return spans;
    Span s = trailing_zero_run(bytes, 0, kIsoSystemArea);
    if (s.length > 0) spans.push_back(s);
    return spans;
  }
  auto sections = pe_sections(bytes);
  if (!sections) return spans;
  for (const PeSection& sec : *sections) {
    if (sec.raw_size == 0) continue;
    const std::size_t used = std::min(sec.virtual_size, sec.raw_size);
    Span s = trailing_zero_run(bytes, sec.raw_offset + used, sec.raw_offset + sec.raw_size);
    if (s.length > 0) spans.push_back(s);
  }
  return spans;
}

}  // namespace polyglot::codecs
