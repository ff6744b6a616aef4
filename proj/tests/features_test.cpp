#include <doctest.h>

#include <numeric>
#include <random>

#include "polyglot/codecs.hpp"
#include "polyglot/error.hpp"
#include "polyglot/features.hpp"
#include "support.hpp"

using namespace polyglot;
using features::Layout;

TEST_SUITE("features") {
  TEST_CASE("hand-counted histogram") {
    const auto v = features::byte_histogram(as_view("AAB\n"));
    CHECK(v.values.size() == 256);
    CHECK(v.values['A'] == 2);
    CHECK(v.values['B'] == 1);
    CHECK(v.values['\n'] == 1);
    CHECK(std::accumulate(v.values.begin(), v.values.end(), 0.0) == 4);
    const auto n = features::byte_histogram(as_view("AAB\n"), true);
    CHECK(n.values['A'] == doctest::Approx(0.5));
    CHECK(features::byte_histogram({}).values == std::vector<double>(256, 0.0));
    CHECK(features::byte_histogram({}, true).values == std::vector<double>(256, 0.0));
  }

  TEST_CASE("counts sum to the length on fuzzed input") {
    std::mt19937_64 g(77);
    for (int i = 0; i < 10000; ++i) {
      const auto b = test::random_bytes(g, g() % 3000);
      const auto v = features::byte_histogram(b);
      REQUIRE(std::accumulate(v.values.begin(), v.values.end(), 0.0) == static_cast<double>(b.size()));
    }
  }

  TEST_CASE("augmented layout has exactly one hot slot") {
    const auto base = features::byte_histogram(as_view("xyz"));
    for (std::size_t slot = 0; slot < features::kMimeSlots; ++slot) {
      const std::optional<FileType> t =
          slot < kFileTypeCount ? std::optional<FileType>(kAllFileTypes[slot]) : std::nullopt;
      const auto v = features::augment_with_mime(base, t);
      CHECK(v.layout == Layout::Augmented);
      REQUIRE(v.values.size() == 267);
      double hot = 0;
      for (std::size_t i = 256; i < 267; ++i) hot += v.values[i];
      CHECK(hot == 1.0);
      CHECK(v.values[256 + slot] == 1.0);
    }
    CHECK(features::mime_slot(std::nullopt) == 10);
  }

  TEST_CASE("augmenting twice is rejected") {
    const auto v = features::augment_with_mime(features::byte_histogram(as_view("a")), FileType::PDF);
    try {
      features::augment_with_mime(v, FileType::PDF);
      FAIL("expected AlreadyAugmented");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AlreadyAugmented);
    }
  }

  TEST_CASE("featurize uses the strict identifier for the type block") {
    const auto gif = codecs::generate_monoglot(FileType::GIF, 1, 900);
    const auto v = features::featurize(gif.bytes, Layout::Augmented);
    CHECK(v.values[256 + static_cast<std::size_t>(FileType::GIF)] == 1.0);
    CHECK(features::featurize(gif.bytes, Layout::Plain).values.size() == 256);
  }

  TEST_CASE("batch errors and CSV round trip") {
    test::TempDir dir;
    write_file(dir.file("a.bin"), as_view("hello"));
    write_file(dir.file("b.bin"), as_view("world!"));
    SUBCASE("missing label") {
      try {
        features::featurize_batch({{dir.file("a.bin"), std::nullopt}}, Layout::Plain);
        FAIL("expected MissingLabel");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingLabel);
      }
    }
    SUBCASE("unreadable file") {
      try {
        features::featurize_batch({{dir.file("nope"), 0}}, Layout::Plain);
        FAIL("expected UnreadableFile");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnreadableFile);
      }
    }
    SUBCASE("round trip keeps every value") {
      for (bool normalize : {false, true}) {
        const auto m = features::featurize_batch({{dir.file("a.bin"), 0}, {dir.file("b.bin"), 1}},
                                                 Layout::Augmented, normalize);
        features::write_matrix(m, dir.file("m.csv"));
        const auto back = features::read_matrix(dir.file("m.csv"));
        CHECK(back.layout == Layout::Augmented);
        CHECK(back.rows == m.rows);
        CHECK(back.labels == std::vector<int>{0, 1});
      }
      const auto text = read_file(dir.file("m.csv"));
      CHECK(std::string(text.begin(), text.begin() + 17) == "layout_version=2\n");
    }
  }
}
