#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polyglot/bytes.hpp"

namespace polyglot::pdf {

/// The header may start anywhere in the first kHeaderWindow bytes.
inline constexpr std::size_t kHeaderWindow = 1024;

struct Object {
  int number = 0;
  std::size_t offset = 0;  // absolute position of "N 0 obj"
  Bytes body;  // everything between "N 0 obj" and "endobj"
};

struct Document {
  std::string version;  // e.g. "1.4"
  std::size_t header_offset = 0;
  int root = 0;
  std::vector<Object> objects;  // ascending object number

  int max_object_number() const;
};

/// Parses through the cross-reference table: header inside the window, the
/// last startxref pointing at an xref table, every in-use entry pointing at
/// a matching "N G obj", stream lengths landing on "endstream", and a
/// trailer with /Root naming an in-use object. Offsets are absolute.
std::optional<Document> parse(ByteView bytes);

/// Incremental serializer. Positions are absolute: `base` is where the
/// first byte written will sit in the final file.
class Writer {
 public:
  explicit Writer(std::size_t base = 0) : base_(base) {}

  void header(std::string_view version);
  void raw(ByteView data) { append(out_, data); }
  void raw(std::string_view text) { put_str(out_, text); }
  /// Records the current position as object `number`'s offset.
  void mark_object(int number);
  void object(int number, ByteView body);
  void stream_object(int number, std::string_view extra_dict, ByteView content);
  /// Writes the xref table, trailer and end marker.
  void finish(int root);

  std::size_t position() const { return base_ + out_.size(); }
  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }
  /// Absolute position of each xref entry's 10-digit offset field.
  const std::vector<std::pair<int, std::size_t>>& xref_fields() const { return xref_fields_; }
  const std::vector<std::pair<int, std::size_t>>& offsets() const { return offsets_; }
  std::size_t xref_offset() const { return xref_offset_; }
  std::size_t startxref_field() const { return startxref_field_; }

 private:
  std::size_t base_;
  Bytes out_;
  std::vector<std::pair<int, std::size_t>> offsets_;
  std::vector<std::pair<int, std::size_t>> xref_fields_;
  std::size_t xref_offset_ = 0;
  std::size_t startxref_field_ = 0;
};

}  // namespace polyglot::pdf
