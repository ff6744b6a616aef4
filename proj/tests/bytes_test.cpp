#include <doctest.h>

#include "polyglot/bytes.hpp"
#include "polyglot/digest.hpp"
#include "polyglot/error.hpp"
#include "polyglot/file_type.hpp"
#include "polyglot/rng.hpp"
#include "support.hpp"

using namespace polyglot;

TEST_SUITE("bytes") {
  TEST_CASE("little and big endian round trips") {
    Bytes b;
    put_le16(b, 0x1234);
    put_le32(b, 0xA1B2C3D4);
    put_be16(b, 0x1234);
    put_be32(b, 0xA1B2C3D4);
    CHECK(b == Bytes{0x34, 0x12, 0xD4, 0xC3, 0xB2, 0xA1, 0x12, 0x34, 0xA1, 0xB2, 0xC3, 0xD4});
    CHECK(read_le16(b, 0) == 0x1234);
    CHECK(read_le32(b, 2) == 0xA1B2C3D4);
    CHECK(read_be16(b, 6) == 0x1234);
    CHECK(read_be32(b, 8) == 0xA1B2C3D4);
  }

  TEST_CASE("find and rfind") {
    const Bytes hay = {'a', 'b', 'c', 'a', 'b', 'c'};
    CHECK(find(hay, "bc") == 1);
    CHECK(find(hay, "bc", 2) == 4);
    CHECK(find(hay, "zz") == npos);
    CHECK(rfind(hay, "bc") == 4);
    CHECK(rfind(hay, "bc", 4) == 4);
    CHECK(rfind(hay, "bc", 3) == 1);
  }

  TEST_CASE("crc32 and sha256 known answers") {
    CHECK(crc32(as_view("123456789")) == 0xCBF43926u);
    CHECK(sha256_hex(as_view("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("file round trip and errors") {
    test::TempDir dir;
    const Bytes data = {0, 1, 2, 255};
    write_file(dir.file("x.bin"), data);
    CHECK(read_file(dir.file("x.bin")) == data);
    CHECK_THROWS_AS(read_file(dir.file("missing")), Error);
    try {
      read_file(dir.file("missing"));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnreadableFile);
    }
  }

  TEST_CASE("type names, aliases and mime strings") {
    for (FileType t : kAllFileTypes) CHECK(parse_file_type(name_of(t)) == t);
    CHECK(parse_file_type("jpeg") == FileType::JPG);
    CHECK(parse_file_type("dicom") == FileType::DCM);
    CHECK(!parse_file_type("elf"));
    CHECK(mime_of(FileType::GIF) == "image/gif");
    CHECK(mime_of(std::nullopt) == "application/octet-stream");
    for (Method m : kAllMethods) CHECK(parse_method(name_of(m)) == m);
  }

  TEST_CASE("rng is deterministic and bounded") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
      const auto v = r.between(3, 9);
      CHECK((v >= 3 && v <= 9));
      const auto l = r.log_uniform(256, 262144);
      CHECK((l >= 256 && l <= 262144));
      const double u = r.unit();
      CHECK((u >= 0.0 && u < 1.0));
    }
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  }
}
