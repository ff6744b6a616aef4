// Test-only helpers and reference implementations. Nothing here calls into
// the library's parsers, so comparisons against them are independent.
#pragma once

#include <unistd.h>
#include <zlib.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polyglot/bytes.hpp"
#include "polyglot/gbdt.hpp"

namespace test {

using polyglot::Bytes;
using polyglot::ByteView;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("polyglot-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::uint32_t le16(ByteView b, std::size_t o) { return b[o] | (b[o + 1] << 8); }
inline std::uint32_t le32(ByteView b, std::size_t o) {
  return b[o] | (b[o + 1] << 8) | (b[o + 2] << 16) | (static_cast<std::uint32_t>(b[o + 3]) << 24);
}

/// Archive reader: takes the last end record whose directory lands exactly
/// before it, walks the directory records, and decodes each member with
/// zlib directly. Returns name -> content, or nullopt on any inconsistency.
inline std::optional<std::map<std::string, Bytes>> read_zip(ByteView b) {
  for (std::size_t end = b.size() >= 22 ? b.size() - 22 + 1 : 0; end-- > 0;) {
    if (!(b[end] == 'P' && b[end + 1] == 'K' && b[end + 2] == 5 && b[end + 3] == 6)) continue;
    const std::size_t count = le16(b, end + 10);
    const std::size_t cd_size = le32(b, end + 12);
    const std::size_t cd = le32(b, end + 16);
    if (cd + cd_size != end) continue;
    std::map<std::string, Bytes> out;
    std::size_t at = cd;
    bool ok = true;
    for (std::size_t i = 0; i < count && ok; ++i) {
      if (at + 46 > end || le32(b, at) != 0x02014b50) {
        ok = false;
        break;
      }
      const std::size_t method = le16(b, at + 10);
      const std::uint32_t crc = le32(b, at + 16);
      const std::size_t csize = le32(b, at + 20), usize = le32(b, at + 24);
      const std::size_t nlen = le16(b, at + 28), xlen = le16(b, at + 30), clen = le16(b, at + 32);
      const std::size_t local = le32(b, at + 42);
      const std::string name(reinterpret_cast<const char*>(b.data() + at + 46), nlen);
      at += 46 + nlen + xlen + clen;
      if (local + 30 > b.size() || le32(b, local) != 0x04034b50) {
        ok = false;
        break;
      }
      const std::size_t data = local + 30 + le16(b, local + 26) + le16(b, local + 28);
      if (data + csize > b.size()) {
        ok = false;
        break;
      }
      Bytes content;
      if (method == 0) {
        content.assign(b.begin() + data, b.begin() + data + csize);
      } else if (method == 8) {
        content.resize(usize + 1);
        z_stream z{};
        inflateInit2(&z, -15);
        z.next_in = const_cast<Bytef*>(b.data() + data);
        z.avail_in = static_cast<uInt>(csize);
        z.next_out = content.data();
        z.avail_out = static_cast<uInt>(content.size());
        const int rc = inflate(&z, Z_FINISH);
        const std::size_t produced = z.total_out;
        inflateEnd(&z);
        if (rc != Z_STREAM_END || produced != usize) ok = false;
        content.resize(usize);
      } else {
        ok = false;
      }
      if (ok && ::crc32(0, content.data(), static_cast<uInt>(content.size())) != crc) ok = false;
      out[name] = std::move(content);
    }
    if (ok && at == end) return out;
  }
  return std::nullopt;
}

/// Recursive evaluation of a boosted ensemble from its node arrays.
inline double walk(const polyglot::gbdt::Tree& t, int node, const std::vector<double>& x) {
  const auto& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.feature < 0) return n.value;
  return walk(t, x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right, x);
}

inline double oracle_proba(const polyglot::gbdt::Model& m, const std::vector<double>& x) {
  double margin = m.base_score;
  for (const auto& t : m.trees) margin += walk(t, 0, x);
  return 1.0 / (1.0 + std::exp(-margin));
}

inline Bytes random_bytes(std::mt19937_64& g, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(g());
  return b;
}

}  // namespace test
