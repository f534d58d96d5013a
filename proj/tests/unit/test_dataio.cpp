#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <random>

#include "format_fixtures.hpp"
#include "migtk/dataio.hpp"

using namespace migtk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("migtk_dataio_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

GrayFrame ramp(int w, int h, int depth = 16, int offset = 0) {
  Raster<std::uint16_t> px(w, h);
  for (std::size_t i = 0; i < px.size(); ++i) px.values()[i] = static_cast<std::uint16_t>((i * 37 + static_cast<std::size_t>(offset)) % (depth == 8 ? 256 : 65536));
  return GrayFrame(std::move(px), depth);
}

bool located(const std::function<void()>& fn, bool unsupported) {
  try {
    fn();
  } catch (const UnsupportedFormatError& e) {
    return unsupported && !e.tag().empty();
  } catch (const ParseError& e) {
    return !unsupported && (e.byte_offset().has_value() || e.line().has_value());
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace

TEST_CASE("2x2 16-bit PGM") {
  const GrayFrame f(Raster<std::uint16_t>(2, 2, std::vector<std::uint16_t>{0, 1, 2, 65535}), 16);
  const auto bytes = encode_image(f, ImageFormat::kPgm);
  CHECK(std::string(bytes.begin(), bytes.begin() + 13) == "P5\n2 2\n65535\n");
  CHECK(decode_image(bytes) == f);
}

TEST_CASE("PGM with comments and 8-bit samples") {
  const std::string header = "P5\n# made by hand\n3 1 # width height\n200\n";
  Bytes b(header.begin(), header.end());
  for (std::uint8_t v : {0, 100, 200}) b.push_back(v);
  const auto f = decode_image(b);
  CHECK(f.bit_depth() == 8);
  CHECK(f(0, 2) == 200);
}

TEST_CASE("TIFF round trip and byte layout") {
  const auto f = ramp(7, 5);
  const auto bytes = encode_image(f, ImageFormat::kTiff);
  CHECK(bytes.size() == 134 + 7 * 5 * 2);
  CHECK(decode_image(bytes) == f);
  CHECK(encode_image(decode_image(bytes), ImageFormat::kTiff) == bytes);
  const auto f8 = ramp(4, 9, 8);
  CHECK(decode_image(encode_image(f8, ImageFormat::kTiff)) == f8);
}

TEST_CASE("big-endian TIFF is read") {
  // Hand-built MM file: 2x1 16-bit, values 0x0102 and 0xA0B0.
  const Bytes b = {'M', 'M', 0, 42, 0, 0, 0, 8,
                   0, 7,
                   1, 0, 0, 3, 0, 0, 0, 1, 0, 2, 0, 0,    // ImageWidth = 2
                   1, 1, 0, 3, 0, 0, 0, 1, 0, 1, 0, 0,    // ImageLength = 1
                   1, 2, 0, 3, 0, 0, 0, 1, 0, 16, 0, 0,   // BitsPerSample = 16
                   1, 6, 0, 3, 0, 0, 0, 1, 0, 1, 0, 0,    // Photometric = 1
                   1, 17, 0, 4, 0, 0, 0, 1, 0, 0, 0, 98,  // StripOffsets = 98
                   1, 22, 0, 3, 0, 0, 0, 1, 0, 1, 0, 0,   // RowsPerStrip = 1
                   1, 23, 0, 4, 0, 0, 0, 1, 0, 0, 0, 4,   // StripByteCounts = 4
                   0, 0, 0, 0,
                   1, 2, 0xA0, 0xB0};
  REQUIRE(b.size() == 102);
  const auto f = decode_image(b);
  CHECK(f.width() == 2);
  CHECK(f(0, 0) == 0x0102);
  CHECK(f(0, 1) == 0xA0B0);
}

TEST_CASE("randomized image round trips") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto f = fixture::random_frame(rng);
    for (auto fmt : {ImageFormat::kTiff, ImageFormat::kPgm}) {
      const auto bytes = encode_image(f, fmt);
      REQUIRE(decode_image(bytes) == f);
      REQUIRE(encode_image(decode_image(bytes), fmt) == bytes);
    }
  }
}

TEST_CASE("malformed images fail with a located error") {
  for (const auto& m : fixture::malformed_images()) {
    CAPTURE(m.name);
    CHECK(located([&] { decode_image(m.bytes); }, m.unsupported));
  }
  // The offending tag is named.
  const auto cases = fixture::malformed_images();
  try {
    decode_image(cases[0].bytes);
  } catch (const UnsupportedFormatError& e) {
    CHECK(e.tag() == "Compression");
  }
}

TEST_CASE("truncated TIFF reports a byte offset inside the file") {
  const auto bytes = encode_image(ramp(3, 3), ImageFormat::kTiff);
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    try {
      decode_image(std::span(bytes.data(), n));
      FAIL("accepted a truncated file");
    } catch (const ParseError& e) {
      REQUIRE(e.byte_offset().has_value());
      CHECK(*e.byte_offset() <= n);
    }
  }
}

TEST_CASE("label masks") {
  TempDir dir;
  LabelMask m(5, 4, 0u);
  m(1, 1) = 65535;
  m(3, 4) = 2;
  write_label_mask(m, dir.path / "mask000.tif");
  CHECK(read_label_mask(dir.path / "mask000.tif") == m);
  m(0, 0) = 70000;
  CHECK_THROWS_AS(write_label_mask(m, dir.path / "bad.tif"), Error);
}

TEST_CASE("track file parsing") {
  CHECK(parse_track_file("1 0 10 0") == std::vector<TrackRecord>{{1, 0, 10, 0}});
  const auto family = parse_track_file("1 0 4 0\n2 5 9 1\n3 5 9 1\n");
  REQUIRE(family.size() == 3);
  CHECK(family[1].parent == 1);
  CHECK(family[2].parent == 1);
  CHECK(parse_track_file("\n  1 0 4 0  \r\n\n").size() == 1);
  CHECK(parse_track_file("").empty());
  try {
    parse_track_file("1 0 4 0\n\n1 5 4 0\n");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    REQUIRE(e.line().has_value());
    CHECK(*e.line() == 3);
  }
  for (const auto& m : fixture::malformed_track_files()) {
    CAPTURE(m.name);
    CHECK(located([&] { parse_track_file(std::string(m.bytes.begin(), m.bytes.end())); }, false));
  }
}

TEST_CASE("randomized track file round trips") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto tracks = fixture::random_tracks(rng);
    const auto text = format_track_file(tracks);
    REQUIRE(parse_track_file(text) == tracks);
    REQUIRE(format_track_file(parse_track_file(text)) == text);
  }
}

TEST_CASE("CTC video directory") {
  TempDir dir;
  for (int t = 0; t < 3; ++t) write_image(ramp(6, 4, 16, t), dir.path / frame_file_name("t", static_cast<std::size_t>(t)));
  auto ds = load_ctc_video(dir.path);
  CHECK(ds.frame_count() == 3);
  CHECK(ds.width == 6);
  CHECK(ds.height == 4);
  CHECK(ds.seg_masks.empty());
  CHECK(!ds.tracks.has_value());
  CHECK(ds.frame(2) == ramp(6, 4, 16, 2));
  CHECK(ds.frame_interval_min == 2.0);

  fs::create_directories(dir.path / "SEG");
  fs::create_directories(dir.path / "TRA");
  write_label_mask(LabelMask(6, 4, 0u), dir.path / "SEG" / "man_seg001.tif");
  write_text(dir.path / "TRA" / "man_track.txt", "1 0 2 0\n");
  ds = load_ctc_video(dir.path);
  CHECK(ds.seg_masks.count(1) == 1);
  REQUIRE(ds.tracks.has_value());
  CHECK(ds.tracks->size() == 1);

  fs::rename(dir.path / "t002.tif", dir.path / "t003.tif");
  try {
    load_ctc_video(dir.path);
    FAIL("expected a contiguity error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("frame 2") != std::string::npos);
  }
  fs::rename(dir.path / "t003.tif", dir.path / "t002.tif");
  write_image(ramp(5, 4), dir.path / "t001.tif");
  try {
    load_ctc_video(dir.path);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
    const std::string msg = e.what();
    CHECK(msg.find("t000") != std::string::npos);
    CHECK(msg.find("t001") != std::string::npos);
  }
  CHECK_THROWS_AS(load_ctc_video(dir.path / "missing"), Error);
}

TEST_CASE("500-frame video and 983x985 frames") {
  TempDir dir;
  const auto big = ramp(985, 983);
  for (int t = 0; t < 3; ++t) write_image(big, dir.path / frame_file_name("t", static_cast<std::size_t>(t)));
  const auto ds = load_ctc_video(dir.path);
  CHECK(ds.width == 985);
  CHECK(ds.height == 983);

  TempDir many;
  const auto small = ramp(8, 8);
  for (int t = 0; t < 500; ++t) write_image(small, many.path / frame_file_name("t", static_cast<std::size_t>(t)));
  CHECK(load_ctc_video(many.path).frame_count() == 500);
}

TEST_CASE("CTC result layout round trip") {
  TempDir dir;
  std::vector<LabelMask> masks(2, LabelMask(4, 4, 0u));
  masks[0](0, 0) = 1;
  masks[1](1, 1) = 1;
  const std::vector<TrackRecord> tracks{{1, 0, 1, 0}};
  write_ctc_result(dir.path, masks, tracks);
  const auto r = load_ctc_result(dir.path);
  CHECK(r.masks == masks);
  REQUIRE(r.tracks.has_value());
  CHECK(*r.tracks == tracks);
}

TEST_CASE("reports and manifests") {
  CHECK(format_number(0.5) == "0.500000");
  CHECK(format_number(-0.0) == "0.000000");
  CHECK(format_number(1.0 / 0.0) == "inf");
  CHECK(format_number(2.0 / 3.0, 3) == "0.667");

  CsvTable t({"a", "b"});
  t.add_row({"1", "x"});
  CHECK(t.str() == "a,b\n1,x\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);

  const auto kv = parse_key_values("# comment\nseed=4\n\npixel_size = 0.802\n");
  REQUIRE(kv.size() == 2);
  CHECK(kv[1] == std::pair<std::string, std::string>{"pixel_size", "0.802"});
  CHECK(parse_key_values(format_key_values(kv)) == kv);
  try {
    parse_key_values("a=1\nb\n");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(*e.line() == 2);
  }
  CHECK_THROWS_AS(parse_key_values("a=1\na=2\n"), ParseError);

  const std::string abc = "abc";
  CHECK(sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size())) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
