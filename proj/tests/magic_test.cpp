#include <doctest.h>

#include <random>

#include "polyglot/codecs.hpp"
#include "polyglot/forge.hpp"
#include "polyglot/magic.hpp"
#include "polyglot/pdf.hpp"
#include "polyglot/zip.hpp"
#include "support.hpp"

using namespace polyglot;

TEST_SUITE("magic") {
  TEST_CASE("strict mode names every generated single-format file") {
    for (FileType t : kAllFileTypes) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = codecs::generate_monoglot(t, seed, codecs::size_bounds(t).min + seed * 1500);
        const auto r = magic::identify_strict(a.bytes);
        CAPTURE(name_of(t));
        CHECK(r.primary == t);
        CHECK_FALSE(r.is_polyglot);
        CHECK(r.mime() == mime_of(t));
      }
    }
  }

  TEST_CASE("report line format") {
    const auto gif = codecs::generate_monoglot(FileType::GIF, 1, 500);
    CHECK(magic::format_report(magic::identify_strict(gif.bytes)) == "0\tGIF\timage/gif\n");
    const Bytes junk(100, 0x11);
    const auto r = magic::identify_strict(junk);
    CHECK_FALSE(r.primary);
    CHECK(r.mime() == "application/octet-stream");
    CHECK(magic::format_report(r) == "-\tunknown\tapplication/octet-stream\n");
  }

  TEST_CASE("archive refined to JAR by its first member") {
    const auto jar = codecs::generate_monoglot(FileType::JAR, 2, 5000);
    CHECK(magic::identify_strict(jar.bytes).primary == FileType::JAR);
    const auto zip = codecs::generate_monoglot(FileType::ZIP, 2, 5000);
    CHECK(magic::identify_strict(zip.bytes).primary == FileType::ZIP);
  }

  TEST_CASE("PDF header window") {
    for (std::size_t lead : {std::size_t{0}, std::size_t{1018}, std::size_t{1019}, std::size_t{1024}}) {
      Bytes b(lead, ' ');
      put_str(b, "%PDF-1.4\n");
      b.resize(b.size() + 100, ' ');
      const auto r = magic::identify_strict(b);
      CAPTURE(lead);
      CHECK((r.primary == FileType::PDF) == (lead + 5 <= 1024));
    }
  }

  TEST_CASE("earliest match wins in strict mode") {
    // GIF at 0 and DICM at 128: the GIF is reported.
    const auto f = forge::zipper(codecs::generate_monoglot(FileType::DCM, 1, 3000),
                                 codecs::generate_monoglot(FileType::GIF, 1, 2000));
    const auto strict = magic::identify_strict(f.artifact.bytes);
    CHECK(strict.primary == FileType::GIF);
    const auto scan = magic::identify_scan(f.artifact.bytes);
    CHECK(scan.is_polyglot);
    REQUIRE(scan.all_matches.size() == 2);
    CHECK(scan.all_matches[0] == magic::Match{FileType::GIF, 0});
    CHECK(scan.all_matches[1] == magic::Match{FileType::DCM, 128});
  }

  TEST_CASE("scan finds a stacked archive only with the trailing search") {
    const auto host = codecs::generate_monoglot(FileType::PDF, 3, 4000);
    const auto guest = codecs::generate_monoglot(FileType::ZIP, 3, 4000);
    const auto b = forge::stack(host, guest).artifact.bytes;
    const auto on = magic::identify_scan(b);
    CHECK(on.is_polyglot);
    REQUIRE(on.all_matches.size() == 2);
    CHECK(on.all_matches[1] == magic::Match{FileType::ZIP, host.bytes.size()});
    CHECK(magic::format_report(on) ==
          "0\tPDF\tapplication/pdf\n" + std::to_string(host.bytes.size()) + "\tZIP\tapplication/zip\n");
    const auto off = magic::identify_scan(b, {.trailing_zip_scan = false});
    CHECK_FALSE(off.is_polyglot);
  }

  TEST_CASE("scan confirms embedded images by parsing them") {
    const auto png = codecs::generate_monoglot(FileType::PNG, 4, 800);
    Bytes b(333, 0x20);
    append(b, png.bytes);
    const auto r = magic::identify_scan(b);
    REQUIRE(r.all_matches.size() == 1);
    CHECK(r.all_matches[0] == magic::Match{FileType::PNG, 333});
    // A bare signature with nothing valid behind it is ignored.
    Bytes fake(50, 0);
    put_str(fake, "GIF89a");
    fake.resize(200, 0);
    CHECK(magic::identify_scan(fake).all_matches.empty());
  }

  TEST_CASE("anchors do not fire on random data") {
    std::mt19937_64 g(5);
    for (int i = 0; i < 500; ++i) {
      const auto b = test::random_bytes(g, 40000);
      CHECK(magic::identify_scan(b).all_matches.empty());
    }
  }

  TEST_CASE("reports are deterministic") {
    const auto iso = codecs::generate_monoglot(FileType::ISO, 1, 60000);
    const auto gif = codecs::generate_monoglot(FileType::GIF, 1, 3000);
    const auto b = forge::cavity(iso, gif).artifact.bytes;
    CHECK(magic::identify_scan(b) == magic::identify_scan(b));
    CHECK(magic::identify_scan(b).all_matches.size() == 2);
  }
}
