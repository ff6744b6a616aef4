#include <doctest.h>

#include <random>

#include "polyglot/codecs.hpp"
#include "polyglot/error.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/zip.hpp"
#include "support.hpp"

using namespace polyglot;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("codecs") {
  TEST_CASE("every type generates valid files across its size range") {
    for (FileType t : kAllFileTypes) {
      const auto b = codecs::size_bounds(t);
      for (std::size_t size : {b.min, b.min + 1, std::size_t{5000}, std::size_t{70000}, std::size_t{300000}}) {
        if (size < b.min || size > b.max) continue;
        CAPTURE(name_of(t));
        CAPTURE(size);
        const auto a = codecs::generate_monoglot(t, 99, size);
        CHECK(codecs::validate(a.bytes, t));
        CHECK(a.declared_types == std::vector<FileType>{t});
        CHECK(!a.is_polyglot());
        // No other format accepts it.
        for (FileType other : kAllFileTypes) {
          const bool zip_family = (t == FileType::JAR && other == FileType::ZIP);
          if (other != t && !zip_family) CHECK_FALSE(codecs::validate(a.bytes, other));
        }
      }
    }
  }

  TEST_CASE("generation is deterministic per seed") {
    for (FileType t : kAllFileTypes) {
      const auto n = codecs::size_bounds(t).min + 3000;
      CHECK(codecs::generate_monoglot(t, 5, n).bytes == codecs::generate_monoglot(t, 5, n).bytes);
      CHECK(codecs::generate_monoglot(t, 5, n).bytes != codecs::generate_monoglot(t, 6, n).bytes);
    }
  }

  TEST_CASE("sizes outside the bounds are rejected") {
    for (FileType t : kAllFileTypes) {
      const auto b = codecs::size_bounds(t);
      CHECK(code_of([&] { codecs::generate_monoglot(t, 1, b.min - 1); }) == ErrorCode::UnsupportedSize);
      CHECK(code_of([&] { codecs::generate_monoglot(t, 1, b.max + 1); }) == ErrorCode::UnsupportedSize);
    }
  }

  TEST_CASE("generated archives read back through an independent reader") {
    for (FileType t : {FileType::ZIP, FileType::JAR}) {
      const auto a = codecs::generate_monoglot(t, 3, 150000);
      const auto oracle = test::read_zip(a.bytes);
      REQUIRE(oracle);
      const auto archive = zip::parse(a.bytes);
      REQUIRE(archive);
      CHECK(archive->entries.size() == oracle->size());
      for (const auto& r : archive->entries) {
        const auto data = zip::extract(a.bytes, r);
        REQUIRE(data);
        CHECK(*data == oracle->at(r.name));
        CHECK(data->size() <= 60000);
      }
      CHECK(oracle->count(std::string(zip::kManifestName)) == (t == FileType::JAR ? 1u : 0u));
    }
  }

  TEST_CASE("zip parser rejects inconsistent directories") {
    const std::vector<zip::Entry> entries = {{"a.txt", {1, 2, 3}}, {"b.txt", {4, 5}}};
    Bytes z = zip::build(entries);
    REQUIRE(zip::parse(z));
    SUBCASE("bad crc") {
      z[zip::kLocalHeaderSize + 5] ^= 0xFF;
      CHECK_FALSE(zip::parse(z));
    }
    SUBCASE("directory offset off by one") {
      const auto a = *zip::parse(z);
      write_le32(z, a.cd_offset_field, static_cast<std::uint32_t>(a.cd_offset + 1));
      CHECK_FALSE(zip::parse(z));
    }
    SUBCASE("local offset moved") {
      const auto a = *zip::parse(z);
      write_le32(z, a.entries[1].local_offset_field, a.entries[1].local_offset - 1);
      CHECK_FALSE(zip::parse(z));
    }
  }

  TEST_CASE("pdf writer output parses and keeps object bodies") {
    pdf::Writer w(0);
    w.header("1.7");
    const std::string body = "\n<< /Type /Catalog >>\n";
    w.object(1, as_view(body));
    w.stream_object(2, "", as_view("hello stream"));
    w.finish(1);
    const auto doc = pdf::parse(w.bytes());
    REQUIRE(doc);
    CHECK(doc->version == "1.7");
    CHECK(doc->root == 1);
    REQUIRE(doc->objects.size() == 2);
    CHECK(doc->objects[0].body == Bytes(body.begin(), body.end()));
    CHECK(doc->objects[1].offset == w.offsets()[1].second);
  }

  TEST_CASE("pdf header may start anywhere in the first 1024 bytes") {
    for (std::size_t lead : {std::size_t{0}, std::size_t{1000}, std::size_t{1030}}) {
      pdf::Writer w(lead);
      w.header("1.4");
      w.object(1, as_view("\n<< /Type /Catalog >>\n"));
      w.finish(1);
      Bytes b(lead, ' ');
      append(b, w.bytes());
      CHECK(codecs::validate(b, FileType::PDF) == (lead < 1024));
    }
  }

  TEST_CASE("PE cavity matches layout arithmetic") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 200; ++i) {
      const std::size_t used = 16 + g() % 40000;
      const std::size_t raw = used + g() % 40000;
      const Bytes pe = codecs::build_pe(g(), used, raw);
      const std::size_t aligned = (raw + 511) / 512 * 512;
      CHECK(pe.size() == 512 + aligned);
      REQUIRE(codecs::validate(pe, FileType::PE));
      const auto spans = codecs::locate_cavities(pe, FileType::PE);
      if (aligned == used) {
        CHECK(spans.empty());
        continue;
      }
      REQUIRE(spans.size() == 1);
      CHECK(spans[0].offset == 512 + used);
      CHECK(spans[0].length == aligned - used);
    }
  }

  TEST_CASE("ISO cavity is the whole system area") {
    const auto iso = codecs::generate_monoglot(FileType::ISO, 4, 100000);
    const auto spans = codecs::locate_cavities(iso.bytes, FileType::ISO);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].offset == 0);
    CHECK(spans[0].length == 32768);
    CHECK(test::le32(iso.bytes, 32768 + 80) * 2048 <= iso.bytes.size());
  }

  TEST_CASE("only ISO and PE host cavities") {
    for (FileType t : kAllFileTypes) {
      const auto a = codecs::generate_monoglot(t, 2, codecs::size_bounds(t).min + 1000);
      if (codecs::capabilities(t).cavity_host) {
        CHECK_NOTHROW(codecs::locate_cavities(a.bytes, t));
      } else {
        CHECK(code_of([&] { codecs::locate_cavities(a.bytes, t); }) == ErrorCode::NotACavityHost);
      }
    }
  }

  TEST_CASE("capabilities table") {
    CHECK(codecs::capabilities(FileType::GIF).max_comment_payload == 255);
    CHECK(codecs::capabilities(FileType::JPG).max_comment_payload == 65533);
    CHECK(codecs::capabilities(FileType::PDF).magic_window == 1024);
    CHECK_FALSE(codecs::capabilities(FileType::ZIP).requires_magic_at_zero);
    CHECK(codecs::capabilities(FileType::ISO).cavity_host);
    CHECK(codecs::capabilities(FileType::PE).cavity_host);
    CHECK_FALSE(codecs::capabilities(FileType::TIFF).comment_capable);
  }

  TEST_CASE("validate survives random and truncated input") {
    std::mt19937_64 g(2024);
    for (int i = 0; i < 2000; ++i) {
      const Bytes junk = test::random_bytes(g, g() % 4096);
      for (FileType t : kAllFileTypes) CHECK_FALSE(codecs::validate(junk, t));
    }
    for (FileType t : kAllFileTypes) {
      const auto a = codecs::generate_monoglot(t, 8, codecs::size_bounds(t).min + 2000);
      for (int i = 0; i < 200; ++i) {
        Bytes cut(a.bytes.begin(), a.bytes.begin() + static_cast<std::ptrdiff_t>(g() % a.bytes.size()));
        if (!cut.empty()) cut[g() % cut.size()] ^= static_cast<std::uint8_t>(1 + g() % 255);
        CHECK_NOTHROW(codecs::validate(cut, t));
      }
    }
  }
}
