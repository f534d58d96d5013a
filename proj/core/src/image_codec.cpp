#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "migtk/dataio.hpp"

namespace migtk {

namespace {

// Bounds-checked little/big-endian reader; every failure reports the byte
// offset at which the read was attempted.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void set_big_endian(bool big) { big_endian_ = big; }
  std::size_t size() const { return bytes_.size(); }

  void require(std::uint64_t offset, std::uint64_t count, const char* what) const {
    if (offset > bytes_.size() || count > bytes_.size() - offset) {
      throw ParseError::at_byte(std::min<std::uint64_t>(offset, bytes_.size()),
                                std::string("truncated file: need ") + std::to_string(count) + " bytes for " + what);
    }
  }
  std::uint8_t u8(std::uint64_t offset, const char* what) const {
    require(offset, 1, what);
    return bytes_[offset];
  }
  std::uint16_t u16(std::uint64_t offset, const char* what) const {
    require(offset, 2, what);
    const auto a = bytes_[offset], b = bytes_[offset + 1];
    return big_endian_ ? static_cast<std::uint16_t>(a << 8 | b) : static_cast<std::uint16_t>(b << 8 | a);
  }
  std::uint32_t u32(std::uint64_t offset, const char* what) const {
    const std::uint32_t lo = u16(offset, what), hi = u16(offset + 2, what);
    return big_endian_ ? (lo << 16 | hi) : (hi << 16 | lo);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  bool big_endian_ = false;
};

constexpr std::uint16_t kImageWidth = 256;
constexpr std::uint16_t kImageLength = 257;
constexpr std::uint16_t kBitsPerSample = 258;
constexpr std::uint16_t kCompression = 259;
constexpr std::uint16_t kPhotometric = 262;
constexpr std::uint16_t kStripOffsets = 273;
constexpr std::uint16_t kSamplesPerPixel = 277;
constexpr std::uint16_t kRowsPerStrip = 278;
constexpr std::uint16_t kStripByteCounts = 279;
constexpr std::uint16_t kPlanarConfiguration = 284;
constexpr std::uint16_t kPredictor = 317;
constexpr std::uint16_t kTileWidth = 322;
constexpr std::uint16_t kSampleFormat = 339;

constexpr std::uint16_t kTypeByte = 1;
constexpr std::uint16_t kTypeShort = 3;
constexpr std::uint16_t kTypeLong = 4;

struct IfdEntry {
  std::uint16_t tag = 0;
  std::uint16_t type = 0;
  std::uint32_t count = 0;
  std::uint64_t value_offset = 0;  // where the value bytes live
};

std::uint32_t type_size(std::uint16_t type) {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: return 4;
    case 5: case 10: case 12: return 8;
    default: return 0;
  }
}

std::vector<std::uint32_t> entry_values(const Reader& in, const IfdEntry& e) {
  std::vector<std::uint32_t> out;
  out.reserve(e.count);
  for (std::uint32_t i = 0; i < e.count; ++i) {
    switch (e.type) {
      case kTypeByte:
        out.push_back(in.u8(e.value_offset + i, "tag value"));
        break;
      case kTypeShort: out.push_back(in.u16(e.value_offset + 2ull * i, "tag value")); break;
      case kTypeLong: out.push_back(in.u32(e.value_offset + 4ull * i, "tag value")); break;
      default:
        throw UnsupportedFormatError("tag " + std::to_string(e.tag), "integer tag stored with non-integer type " +
                                                                         std::to_string(e.type));
    }
  }
  return out;
}

std::uint32_t single_value(const Reader& in, const IfdEntry& e, const char* name) {
  const auto values = entry_values(in, e);
  if (values.size() != 1) {
    throw UnsupportedFormatError(name, "expected exactly one value, found " + std::to_string(values.size()));
  }
  return values.front();
}

GrayFrame decode_tiff(std::span<const std::uint8_t> bytes, double pixel_size_um) {
  Reader in(bytes);
  in.require(0, 8, "TIFF header");
  if (bytes[0] == 'M' && bytes[1] == 'M') in.set_big_endian(true);
  else if (!(bytes[0] == 'I' && bytes[1] == 'I')) throw ParseError::at_byte(0, "bad TIFF byte-order mark");
  if (in.u16(2, "TIFF magic") != 42) throw ParseError::at_byte(2, "bad TIFF magic number");
  const std::uint32_t ifd = in.u32(4, "IFD offset");
  if (ifd < 8) throw ParseError::at_byte(4, "IFD offset points into the header");
  const std::uint16_t count = in.u16(ifd, "IFD entry count");
  in.require(ifd + 2, 12ull * count + 4, "IFD entries");

  std::map<std::uint16_t, IfdEntry> entries;
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::uint64_t at = ifd + 2 + 12ull * i;
    IfdEntry e;
    e.tag = in.u16(at, "tag");
    e.type = in.u16(at + 2, "tag type");
    e.count = in.u32(at + 4, "tag count");
    const std::uint64_t total = static_cast<std::uint64_t>(type_size(e.type)) * e.count;
    e.value_offset = total <= 4 ? at + 8 : in.u32(at + 8, "tag value offset");
    if (type_size(e.type) != 0) in.require(e.value_offset, total, "tag value");
    entries[e.tag] = e;
  }
  const std::uint64_t next_ifd_at = ifd + 2 + 12ull * count;
  if (in.u32(next_ifd_at, "next IFD offset") != 0) {
    throw UnsupportedFormatError("NextIFD", "multi-page TIFF");
  }

  auto get = [&](std::uint16_t tag, const char* name) -> const IfdEntry& {
    auto it = entries.find(tag);
    if (it == entries.end()) throw ParseError::at_byte(ifd, std::string("missing required tag ") + name);
    return it->second;
  };
  auto optional_value = [&](std::uint16_t tag, const char* name, std::uint32_t fallback) {
    auto it = entries.find(tag);
    return it == entries.end() ? fallback : single_value(in, it->second, name);
  };

  if (entries.count(kTileWidth)) throw UnsupportedFormatError("TileWidth", "tiled TIFF");
  if (const auto c = optional_value(kCompression, "Compression", 1); c != 1) {
    throw UnsupportedFormatError("Compression", "compressed TIFF (scheme " + std::to_string(c) + ")");
  }
  if (const auto spp = optional_value(kSamplesPerPixel, "SamplesPerPixel", 1); spp != 1) {
    throw UnsupportedFormatError("SamplesPerPixel", std::to_string(spp) + "-channel TIFF");
  }
  if (const auto pc = optional_value(kPlanarConfiguration, "PlanarConfiguration", 1); pc != 1) {
    throw UnsupportedFormatError("PlanarConfiguration", "planar configuration " + std::to_string(pc));
  }
  if (const auto pr = optional_value(kPredictor, "Predictor", 1); pr != 1) {
    throw UnsupportedFormatError("Predictor", "predictor " + std::to_string(pr));
  }
  if (const auto sf = optional_value(kSampleFormat, "SampleFormat", 1); sf != 1) {
    throw UnsupportedFormatError("SampleFormat", "non-unsigned-integer samples");
  }
  if (const auto pi = optional_value(kPhotometric, "PhotometricInterpretation", 1); pi > 1) {
    throw UnsupportedFormatError("PhotometricInterpretation", "photometric interpretation " + std::to_string(pi));
  }
  const auto bits_values = entry_values(in, get(kBitsPerSample, "BitsPerSample"));
  if (bits_values.size() != 1 || (bits_values[0] != 8 && bits_values[0] != 16)) {
    throw UnsupportedFormatError("BitsPerSample", "only 8- or 16-bit single-sample images are supported");
  }
  const int bits = static_cast<int>(bits_values[0]);
  const std::uint32_t width = single_value(in, get(kImageWidth, "ImageWidth"), "ImageWidth");
  const std::uint32_t height = single_value(in, get(kImageLength, "ImageLength"), "ImageLength");
  if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20)) {
    throw ParseError::at_byte(ifd, "implausible image size " + std::to_string(width) + "x" + std::to_string(height));
  }
  const std::uint32_t rows_per_strip = std::min(optional_value(kRowsPerStrip, "RowsPerStrip", height), height);
  if (rows_per_strip == 0) throw ParseError::at_byte(ifd, "RowsPerStrip is zero");
  const auto offsets = entry_values(in, get(kStripOffsets, "StripOffsets"));
  const auto counts = entry_values(in, get(kStripByteCounts, "StripByteCounts"));
  const std::uint32_t strips = (height + rows_per_strip - 1) / rows_per_strip;
  if (offsets.size() != strips || counts.size() != strips) {
    throw ParseError::at_byte(ifd, "expected " + std::to_string(strips) + " strips, found " +
                                       std::to_string(offsets.size()) + " offsets and " +
                                       std::to_string(counts.size()) + " byte counts");
  }

  const std::uint64_t bytes_per_sample = static_cast<std::uint64_t>(bits) / 8;
  const std::uint64_t row_bytes = bytes_per_sample * width;
  Raster<std::uint16_t> pixels(static_cast<int>(width), static_cast<int>(height));
  auto dst = pixels.values();
  std::size_t k = 0;
  for (std::uint32_t s = 0; s < strips; ++s) {
    const std::uint32_t rows = std::min(rows_per_strip, height - s * rows_per_strip);
    const std::uint64_t expected = row_bytes * rows;
    if (counts[s] != expected) {
      throw ParseError::at_byte(ifd, "strip " + std::to_string(s) + " holds " + std::to_string(counts[s]) +
                                         " bytes, expected " + std::to_string(expected));
    }
    in.require(offsets[s], expected, "strip data");
    const std::uint8_t* p = bytes.data() + offsets[s];
    if (bits == 8) {
      for (std::uint64_t i = 0; i < expected; ++i) dst[k++] = p[i];
    } else {
      for (std::uint64_t i = 0; i < expected; i += 2) dst[k++] = in.u16(offsets[s] + i, "sample");
    }
  }
  return GrayFrame(std::move(pixels), bits, pixel_size_um);
}

Bytes encode_tiff(const GrayFrame& frame) {
  Bytes out;
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put32 = [&](std::uint32_t v) {
    put16(static_cast<std::uint16_t>(v & 0xffff));
    put16(static_cast<std::uint16_t>(v >> 16));
  };
  const auto w = static_cast<std::uint32_t>(frame.width());
  const auto h = static_cast<std::uint32_t>(frame.height());
  const auto bps = static_cast<std::uint32_t>(frame.bit_depth());
  const std::uint32_t data_bytes = w * h * (bps / 8);
  constexpr std::uint16_t kEntries = 10;
  const std::uint32_t data_offset = 8 + 2 + 12 * kEntries + 4;

  out.reserve(data_offset + data_bytes);
  out.push_back('I');
  out.push_back('I');
  put16(42);
  put32(8);
  put16(kEntries);
  auto entry = [&](std::uint16_t tag, std::uint16_t type, std::uint32_t value) {
    put16(tag);
    put16(type);
    put32(1);
    if (type == kTypeShort) {
      put16(static_cast<std::uint16_t>(value));
      put16(0);
    } else {
      put32(value);
    }
  };
  entry(kImageWidth, kTypeLong, w);
  entry(kImageLength, kTypeLong, h);
  entry(kBitsPerSample, kTypeShort, bps);
  entry(kCompression, kTypeShort, 1);
  entry(kPhotometric, kTypeShort, 1);
  entry(kStripOffsets, kTypeLong, data_offset);
  entry(kSamplesPerPixel, kTypeShort, 1);
  entry(kRowsPerStrip, kTypeLong, h);
  entry(kStripByteCounts, kTypeLong, data_bytes);
  entry(kPlanarConfiguration, kTypeShort, 1);
  put32(0);
  for (auto v : frame.pixels().values()) {
    if (bps == 8) out.push_back(static_cast<std::uint8_t>(v));
    else put16(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

GrayFrame decode_pgm(std::span<const std::uint8_t> bytes, double pixel_size_um) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    for (;;) {
      if (pos >= bytes.size()) throw ParseError::at_byte(pos, "truncated PGM header");
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        return;
      }
    }
  };
  auto number = [&](const char* what) {
    skip_space();
    const std::size_t start = pos;
    std::uint64_t value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > (1u << 20)) throw ParseError::at_byte(start, std::string("PGM ") + what + " too large");
      ++pos;
    }
    if (pos == start) throw ParseError::at_byte(pos, std::string("expected PGM ") + what);
    if (pos >= bytes.size()) throw ParseError::at_byte(pos, "truncated PGM header");
    return static_cast<std::uint32_t>(value);
  };
  const auto width = number("width");
  const auto height = number("height");
  const auto maxval = number("maxval");
  if (width == 0 || height == 0) throw ParseError::at_byte(pos, "PGM image has zero size");
  if (maxval == 0 || maxval > 65535) throw ParseError::at_byte(pos, "PGM maxval out of range");
  if (!std::isspace(bytes[pos])) throw ParseError::at_byte(pos, "expected whitespace after PGM maxval");
  ++pos;

  const int bits = maxval < 256 ? 8 : 16;
  const std::uint64_t sample = bits / 8;
  const std::uint64_t need = sample * width * height;
  if (bytes.size() - pos < need) {
    throw ParseError::at_byte(bytes.size(), "truncated PGM pixel data: need " + std::to_string(need) + " bytes");
  }
  if (bytes.size() - pos > need) throw ParseError::at_byte(pos + need, "trailing bytes after PGM pixel data");
  Raster<std::uint16_t> pixels(static_cast<int>(width), static_cast<int>(height));
  auto dst = pixels.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::size_t at = pos + i * sample;
    const std::uint16_t v = bits == 8 ? bytes[at] : static_cast<std::uint16_t>(bytes[at] << 8 | bytes[at + 1]);
    if (v > maxval) throw ParseError::at_byte(at, "sample exceeds PGM maxval");
    dst[i] = v;
  }
  return GrayFrame(std::move(pixels), bits, pixel_size_um);
}

Bytes encode_pgm(const GrayFrame& frame) {
  const std::string header = "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n" +
                             std::to_string(frame.max_value()) + "\n";
  Bytes out(header.begin(), header.end());
  for (auto v : frame.pixels().values()) {
    if (frame.bit_depth() == 8) {
      out.push_back(static_cast<std::uint8_t>(v));
    } else {
      out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
  }
  return out;
}

ImageFormat format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".tif" || ext == ".tiff") return ImageFormat::kTiff;
  if (ext == ".pgm") return ImageFormat::kPgm;
  throw UnsupportedFormatError("extension", "unknown image extension '" + ext + "' for " + path.string());
}

}  // namespace

GrayFrame decode_image(std::span<const std::uint8_t> bytes, double pixel_size_um) {
  if (bytes.size() < 2) throw ParseError::at_byte(bytes.size(), "file too short to identify");
  if ((bytes[0] == 'I' && bytes[1] == 'I') || (bytes[0] == 'M' && bytes[1] == 'M')) {
    return decode_tiff(bytes, pixel_size_um);
  }
  if (bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, pixel_size_um);
  throw UnsupportedFormatError("magic", "not a TIFF or binary PGM file");
}

Bytes encode_image(const GrayFrame& frame, ImageFormat format) {
  return format == ImageFormat::kTiff ? encode_tiff(frame) : encode_pgm(frame);
}

GrayFrame read_image(const std::filesystem::path& path, double pixel_size_um) {
  const auto bytes = read_file(path);
  try {
    return decode_image(bytes, pixel_size_um);
  } catch (const ParseError& e) {
    throw ParseError::at_byte(*e.byte_offset(), path.string() + ": " + e.what());
  }
}

void write_image(const GrayFrame& frame, const std::filesystem::path& path) {
  write_file(path, encode_image(frame, format_for(path)));
}

LabelMask decode_label_mask(std::span<const std::uint8_t> bytes) {
  const auto frame = decode_image(bytes);
  const auto src = frame.pixels().values();
  return LabelMask(frame.width(), frame.height(), std::vector<std::uint32_t>(src.begin(), src.end()));
}

LabelMask read_label_mask(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_label_mask(bytes);
  } catch (const ParseError& e) {
    throw ParseError::at_byte(*e.byte_offset(), path.string() + ": " + e.what());
  }
}

void write_label_mask(const LabelMask& mask, const std::filesystem::path& path) {
  if (mask.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot write an empty mask");
  Raster<std::uint16_t> pixels(mask.width(), mask.height());
  auto dst = pixels.values();
  const auto src = mask.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] > 65535) throw Error(ErrorKind::kInvalidArgument, "label " + std::to_string(src[i]) + " exceeds 16 bits");
    dst[i] = static_cast<std::uint16_t>(src[i]);
  }
  write_image(GrayFrame(std::move(pixels), 16), path);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace migtk
