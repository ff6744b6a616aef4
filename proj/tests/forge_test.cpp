#include <doctest.h>

#include <algorithm>
#include <set>

#include "forge_detail.hpp"
#include "polyglot/codecs.hpp"
#include "polyglot/error.hpp"
#include "polyglot/forge.hpp"
#include "polyglot/magic.hpp"
#include "polyglot/rng.hpp"
#include "support.hpp"

using namespace polyglot;
using forge::Recipe;

namespace {

bool is_archive(FileType t) { return t == FileType::ZIP || t == FileType::JAR; }

// Donors sized so every recipe in the matrix fits.
std::pair<FileArtifact, FileArtifact> donors(const Recipe& r, std::uint64_t seed) {
  Rng rng(seed);
  const auto pick = [&](FileType t, std::size_t cap) {
    const std::size_t lo = std::max<std::size_t>(256, codecs::size_bounds(t).min);
    return codecs::generate_monoglot(t, rng.next(), rng.log_uniform(lo, std::max(lo, cap)));
  };
  if (r.method == Method::Cavity && r.host == FileType::PE) {
    auto guest = pick(r.guest, 40000);
    const std::size_t used = rng.log_uniform(64, 20000);
    FileArtifact host;
    host.bytes = codecs::build_pe(rng.next(), used, used + guest.bytes.size() + rng.below(2000));
    host.declared_types = {FileType::PE};
    return {host, guest};
  }
  const std::size_t guest_cap = r.method == Method::Cavity ? 30000 : 120000;
  auto host = pick(r.host, 120000);
  return {host, pick(r.guest, guest_cap)};
}

// Elements after the pixel data must tile the rest of the file exactly.
bool dicom_tail_parses(ByteView b) {
  const auto layout = codecs::dicom_layout(b);
  if (!layout) return false;
  std::size_t at = layout->pixel_value_offset + layout->pixel_value_length;
  while (at + 12 <= b.size()) {
    if (b[at + 4] != 'O' || b[at + 5] != 'B') return false;
    at += 12 + test::le32(b, at + 8);
  }
  return at == b.size();
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

void revert(Bytes& b, const forge::OffsetFixup& f) {
  if (f.width == 4) {
    const auto v = static_cast<std::int64_t>(test::le32(b, f.position)) - f.delta;
    write_le32(b, f.position, static_cast<std::uint32_t>(v));
    return;
  }
  // Decimal text field of fixed width (PDF cross-reference data).
  std::string digits(reinterpret_cast<const char*>(b.data() + f.position), f.width);
  auto v = std::stoll(digits) - f.delta;
  std::string text = std::to_string(v);
  if (text.size() < f.width) text = std::string(f.width - text.size(), '0') + text;
  text.resize(f.width);
  std::copy(text.begin(), text.end(), b.begin() + static_cast<std::ptrdiff_t>(f.position));
}

}  // namespace

TEST_SUITE("forge") {
  TEST_CASE("applicability matrix") {
    const auto all = forge::enumerate_recipes();
    CHECK(all.size() == 32);
    std::map<Method, int> per_method;
    for (const auto& r : all) {
      CHECK(forge::is_applicable(r));
      ++per_method[r.method];
    }
    CHECK(per_method[Method::Stack] == 14);
    CHECK(per_method[Method::Parasite] == 8);
    CHECK(per_method[Method::Zipper] == 2);
    CHECK(per_method[Method::Cavity] == 8);
    CHECK_FALSE(forge::is_applicable({FileType::GIF, FileType::PNG, Method::Stack}));
    CHECK_FALSE(forge::is_applicable({FileType::TIFF, FileType::ZIP, Method::Parasite}));
    CHECK_FALSE(forge::is_applicable({FileType::PE, FileType::PNG, Method::Cavity}));
    CHECK_FALSE(forge::is_applicable({FileType::ZIP, FileType::PDF, Method::Stack}));
  }

  TEST_CASE("default corpus recipes are 21 distinct matrix entries") {
    const auto list = forge::default_corpus_recipes();
    CHECK(list.size() == 21);
    const auto all = forge::enumerate_recipes();
    std::set<std::string> seen;
    for (const auto& r : list) {
      CHECK(std::find(all.begin(), all.end(), r) != all.end());
      CHECK(seen.insert(forge::to_string(r)).second);
    }
  }

  TEST_CASE("every recipe is valid as both formats and keeps the guest recoverable") {
    for (const auto& r : forge::enumerate_recipes()) {
      for (std::uint64_t i = 0; i < 12; ++i) {
        CAPTURE(forge::to_string(r));
        CAPTURE(i);
        const auto [host, guest] = donors(r, derive_seed(0xF0F0, i * 64 + static_cast<std::uint64_t>(r.method)));
        const auto f = forge::forge(host, guest, r.method);
        const auto& b = f.artifact.bytes;
        CHECK(codecs::validate(b, r.host));
        CHECK(codecs::validate(b, r.guest));
        CHECK(f.artifact.declared_types == std::vector<FileType>{r.host, r.guest});
        CHECK(f.artifact.method == r.method);
        CHECK(f.artifact.is_polyglot());
        const auto expected = forge::logical_content(guest.bytes, r.guest);
        REQUIRE(expected);
        CHECK(forge::logical_content(b, r.guest) == expected);
        if (is_archive(r.guest)) {
          const auto mine = test::read_zip(b);
          REQUIRE(mine);
          CHECK(*mine == *test::read_zip(guest.bytes));
        }
      }
    }
  }

  TEST_CASE("stack appends and shifts archive offsets by the host size") {
    const auto host = codecs::generate_monoglot(FileType::PNG, 1, 5000);
    const auto guest = codecs::generate_monoglot(FileType::ZIP, 2, 8000);
    const auto f = forge::stack(host, guest);
    const auto& b = f.artifact.bytes;
    CHECK(b.size() == host.bytes.size() + guest.bytes.size());
    CHECK(std::equal(host.bytes.begin(), host.bytes.end(), b.begin()));
    REQUIRE_FALSE(f.fixups.empty());
    for (const auto& x : f.fixups) {
      CHECK(x.delta == static_cast<std::int64_t>(host.bytes.size()));
      CHECK(x.width == 4);
    }
  }

  TEST_CASE("cavity leaves host bytes outside the guest untouched") {
    for (const auto& r : {Recipe{FileType::ISO, FileType::GIF, Method::Cavity},
                          Recipe{FileType::PE, FileType::ZIP, Method::Cavity}}) {
      const auto [host, guest] = donors(r, 77);
      const auto f = forge::cavity(host, guest);
      const auto& b = f.artifact.bytes;
      REQUIRE(b.size() == host.bytes.size());
      const auto span = codecs::locate_cavities(host.bytes, r.host).front();
      for (std::size_t i = 0; i < b.size(); ++i)
        if (i < span.offset || i >= span.offset + guest.bytes.size()) REQUIRE(b[i] == host.bytes[i]);
    }
  }

  TEST_CASE("reverting any fixup breaks the polyglot") {
    for (const auto& r : forge::enumerate_recipes()) {
      const auto [host, guest] = donors(r, derive_seed(5, static_cast<std::uint64_t>(r.host) * 16 + static_cast<std::uint64_t>(r.guest)));
      const auto f = forge::forge(host, guest, r.method);
      if (r.method == Method::Zipper) CHECK(dicom_tail_parses(f.artifact.bytes));
      for (const auto& x : f.fixups) {
        CAPTURE(forge::to_string(r));
        CAPTURE(x.description);
        CHECK(x.delta != 0);
        Bytes b = f.artifact.bytes;
        revert(b, x);
        const bool tail_ok = r.method != Method::Zipper || dicom_tail_parses(b);
        CHECK_FALSE((codecs::validate(b, r.host) && codecs::validate(b, r.guest) && tail_ok));
      }
    }
  }

  TEST_CASE("strict identification sees only the format at the front") {
    for (const auto& r : forge::enumerate_recipes()) {
      const auto [host, guest] = donors(r, 3);
      const auto f = forge::forge(host, guest, r.method);
      const auto id = magic::identify_strict(f.artifact.bytes);
      CHECK_FALSE(id.is_polyglot);
      CHECK(id.all_matches.size() == 1);
    }
  }

  TEST_CASE("inapplicable combinations") {
    const auto gif = codecs::generate_monoglot(FileType::GIF, 1, 3000);
    const auto png = codecs::generate_monoglot(FileType::PNG, 1, 3000);
    const auto zip = codecs::generate_monoglot(FileType::ZIP, 1, 3000);
    CHECK(code_of([&] { forge::forge(gif, png, Method::Stack); }) == ErrorCode::InapplicableRecipe);
    CHECK(code_of([&] { forge::forge(zip, gif, Method::Parasite); }) == ErrorCode::InapplicableRecipe);
    CHECK(code_of([&] { forge::forge(gif, zip, Method::Cavity); }) == ErrorCode::InapplicableRecipe);
    const auto poly = forge::stack(gif, zip).artifact;
    CHECK(code_of([&] { forge::forge(poly, zip, Method::Stack); }) == ErrorCode::InapplicableRecipe);
  }

  TEST_CASE("guests that do not fit") {
    SUBCASE("larger than the ISO system area") {
      const auto iso = codecs::generate_monoglot(FileType::ISO, 1, 50000);
      const auto png = codecs::generate_monoglot(FileType::PNG, 1, 40000);
      CHECK(code_of([&] { forge::cavity(iso, png); }) == ErrorCode::GuestTooLarge);
    }
    SUBCASE("archive member larger than a JPEG comment segment") {
      FileArtifact guest;
      guest.bytes = zip::build(std::vector<zip::Entry>{{"big.bin", Bytes(70000, 7)}});
      guest.declared_types = {FileType::ZIP};
      const auto jpg = codecs::generate_monoglot(FileType::JPG, 1, 3000);
      CHECK(code_of([&] { forge::parasite(jpg, guest); }) == ErrorCode::GuestTooLarge);
    }
    SUBCASE("PE padding smaller than the guest") {
      FileArtifact pe;
      pe.bytes = codecs::build_pe(1, 1000, 1100);
      pe.declared_types = {FileType::PE};
      const auto zip = codecs::generate_monoglot(FileType::ZIP, 1, 3000);
      CHECK(code_of([&] { forge::cavity(pe, zip); }) == ErrorCode::GuestTooLarge);
    }
  }

  TEST_CASE("offsets past 32 bits overflow") {
    Bytes b(8, 0);
    std::vector<forge::OffsetFixup> fixups;
    CHECK(code_of([&] { forge::detail::patch_offset(b, 0, 10, 0x100000000LL, "offset", fixups); }) ==
          ErrorCode::FixupOverflow);
    forge::detail::patch_offset(b, 0, 10, 0xFFFFFFFFLL, "offset", fixups);
    CHECK(test::le32(b, 0) == 0xFFFFFFFFu);
    REQUIRE(fixups.size() == 1);
    CHECK(fixups[0].delta == 0xFFFFFFFFLL - 10);
  }

  TEST_CASE("GIF parasite threads the archive through comment sub-blocks") {
    const auto gif = codecs::generate_monoglot(FileType::GIF, 4, 2000);
    const auto jar = codecs::generate_monoglot(FileType::JAR, 4, 30000);
    const auto f = forge::parasite(gif, jar);
    const auto& b = f.artifact.bytes;
    const std::size_t start = *codecs::gif_blocks_offset(gif.bytes);
    REQUIRE(b[start] == 0x21);
    REQUIRE(b[start + 1] == 0xFE);
    // Walk the sub-blocks by hand: they must end in a terminator followed by
    // the host's original blocks.
    std::size_t at = start + 2;
    while (b[at] != 0) at += 1 + b[at];
    CHECK(std::equal(gif.bytes.begin() + static_cast<std::ptrdiff_t>(start), gif.bytes.end(), b.begin() + static_cast<std::ptrdiff_t>(at + 1)));
    CHECK(*test::read_zip(b) == *test::read_zip(jar.bytes));
  }

  TEST_CASE("zippers keep both magics at their fixed offsets") {
    for (FileType g : {FileType::GIF, FileType::PDF}) {
      const auto [host, guest] = donors({FileType::DCM, g, Method::Zipper}, 9);
      const auto b = forge::zipper(host, guest).artifact.bytes;
      CHECK(starts_with_at(b, 128, "DICM"));
      CHECK(starts_with_at(b, 0, g == FileType::GIF ? "GIF8" : "%PDF-"));
      CHECK(b.size() % 2 == 0);
    }
  }
}
