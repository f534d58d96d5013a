#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <regex>
#include <set>

#include "migtk/dataio.hpp"

namespace migtk {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Track files

namespace {

template <typename T>
T parse_integer(std::string_view token, std::size_t line, const char* field) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError::at_line(line, std::string("field ") + field + ": '" + std::string(token) +
                                        "' is not a valid non-negative integer");
  }
  return value;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    ++line_no;
    fn(line, line_no);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
}

}  // namespace

std::vector<TrackRecord> parse_track_file(std::string_view text) {
  std::vector<TrackRecord> records;
  std::vector<std::size_t> lines;
  std::map<std::uint32_t, std::size_t> by_label;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) return;
    if (tokens.size() != 4) {
      throw ParseError::at_line(line_no, "expected 4 integers 'L B E P', found " + std::to_string(tokens.size()) +
                                             " fields");
    }
    TrackRecord r;
    r.label = parse_integer<std::uint32_t>(tokens[0], line_no, "L");
    const auto begin = parse_integer<std::uint32_t>(tokens[1], line_no, "B");
    const auto end = parse_integer<std::uint32_t>(tokens[2], line_no, "E");
    r.parent = parse_integer<std::uint32_t>(tokens[3], line_no, "P");
    constexpr auto kMaxFrame = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
    if (begin > kMaxFrame || end > kMaxFrame) throw ParseError::at_line(line_no, "frame index out of range");
    r.begin_frame = static_cast<int>(begin);
    r.end_frame = static_cast<int>(end);
    if (r.label == 0) throw ParseError::at_line(line_no, "track label must be positive");
    if (r.end_frame < r.begin_frame) throw ParseError::at_line(line_no, "end frame precedes begin frame");
    if (r.parent == r.label) throw ParseError::at_line(line_no, "track is its own parent");
    if (!by_label.emplace(r.label, records.size()).second) {
      throw ParseError::at_line(line_no, "duplicate track label " + std::to_string(r.label));
    }
    records.push_back(r);
    lines.push_back(line_no);
  });
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.parent == 0) continue;
    auto it = by_label.find(r.parent);
    if (it == by_label.end()) {
      throw ParseError::at_line(lines[i], "parent " + std::to_string(r.parent) + " is not declared");
    }
    if (records[it->second].end_frame >= r.begin_frame) {
      throw ParseError::at_line(lines[i], "parent " + std::to_string(r.parent) + " ends at frame " +
                                              std::to_string(records[it->second].end_frame) +
                                              ", not before this track begins");
    }
  }
  return records;
}

std::string format_track_file(std::span<const TrackRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += std::to_string(r.label) + ' ' + std::to_string(r.begin_frame) + ' ' + std::to_string(r.end_frame) + ' ' +
           std::to_string(r.parent) + '\n';
  }
  return out;
}

std::vector<TrackRecord> read_track_file(const fs::path& path) {
  const auto text = read_text(path);
  try {
    return parse_track_file(text);
  } catch (const ParseError& e) {
    throw ParseError::at_line(*e.line(), path.string() + ": " + e.what());
  }
}

void write_track_file(std::span<const TrackRecord> records, const fs::path& path) {
  write_text(path, format_track_file(records));
}

// ---------------------------------------------------------------------------
// CTC layout

std::map<int, fs::path> list_indexed_files(const fs::path& dir, std::string_view prefix) {
  std::map<int, fs::path> out;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kIo, "not a directory: " + dir.string());
  const std::regex pattern(std::string(prefix) + R"((\d+)\.(tif|tiff|pgm))", std::regex::icase);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    const int index = std::stoi(m[1].str());
    if (!out.emplace(index, entry.path()).second) {
      throw Error(ErrorKind::kStructural, "two files for frame " + std::to_string(index) + " in " + dir.string());
    }
  }
  return out;
}

namespace {

std::vector<fs::path> contiguous(const std::map<int, fs::path>& files, const fs::path& dir) {
  std::vector<fs::path> out;
  int expected = 0;
  for (const auto& [index, path] : files) {
    if (index != expected) {
      throw Error(ErrorKind::kStructural, "frame " + std::to_string(expected) + " is missing in " + dir.string());
    }
    out.push_back(path);
    ++expected;
  }
  return out;
}

}  // namespace

GrayFrame VideoDataset::frame(std::size_t t) const { return read_image(frame_paths.at(t), pixel_size_um); }

std::vector<GrayFrame> VideoDataset::frames() const {
  std::vector<GrayFrame> out;
  out.reserve(frame_paths.size());
  for (std::size_t t = 0; t < frame_paths.size(); ++t) out.push_back(frame(t));
  return out;
}

VideoDataset load_ctc_video(const fs::path& dir, double pixel_size_um, double frame_interval_min) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kIo, "video directory does not exist: " + dir.string());
  if (!(pixel_size_um > 0.0)) throw Error(ErrorKind::kInvalidArgument, "pixel size must be positive");
  if (!(frame_interval_min > 0.0)) throw Error(ErrorKind::kInvalidArgument, "frame interval must be positive");
  VideoDataset ds;
  ds.root = dir;
  ds.pixel_size_um = pixel_size_um;
  ds.frame_interval_min = frame_interval_min;
  ds.frame_paths = contiguous(list_indexed_files(dir, "t"), dir);
  if (ds.frame_paths.empty()) throw Error(ErrorKind::kStructural, "no frames t<N>.tif in " + dir.string());
  for (std::size_t t = 0; t < ds.frame_paths.size(); ++t) {
    const auto f = ds.frame(t);
    if (t == 0) {
      ds.width = f.width();
      ds.height = f.height();
      ds.bit_depth = f.bit_depth();
    } else if (f.width() != ds.width || f.height() != ds.height) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "frame " + std::to_string(t) + " (" + ds.frame_paths[t].filename().string() + ", " +
                      std::to_string(f.width()) + "x" + std::to_string(f.height()) + ") differs from frame 0 (" +
                      ds.frame_paths[0].filename().string() + ", " + std::to_string(ds.width) + "x" +
                      std::to_string(ds.height) + ")");
    }
  }
  if (fs::is_directory(dir / "SEG")) ds.seg_masks = list_indexed_files(dir / "SEG", "man_seg");
  if (fs::is_directory(dir / "TRA")) {
    ds.tra_masks = list_indexed_files(dir / "TRA", "man_track");
    if (fs::exists(dir / "TRA" / "man_track.txt")) ds.tracks = read_track_file(dir / "TRA" / "man_track.txt");
  }
  for (const auto* series : {&ds.seg_masks, &ds.tra_masks}) {
    for (const auto& [index, path] : *series) {
      if (index < 0 || static_cast<std::size_t>(index) >= ds.frame_paths.size()) {
        throw Error(ErrorKind::kStructural, path.string() + " refers to a frame outside the video");
      }
    }
  }
  return ds;
}

std::vector<LabelMask> load_mask_series(const fs::path& dir, std::string_view prefix) {
  const auto paths = contiguous(list_indexed_files(dir, prefix), dir);
  std::vector<LabelMask> masks;
  masks.reserve(paths.size());
  for (std::size_t t = 0; t < paths.size(); ++t) {
    masks.push_back(read_label_mask(paths[t]));
    if (!masks.back().same_shape(masks.front())) {
      throw Error(ErrorKind::kDimensionMismatch, paths[t].filename().string() + " differs in size from " +
                                                     paths[0].filename().string());
    }
  }
  return masks;
}

CtcResult load_ctc_result(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kIo, "result directory does not exist: " + dir.string());
  CtcResult out;
  out.masks = load_mask_series(dir, "mask");
  if (fs::exists(dir / "res_track.txt")) out.tracks = read_track_file(dir / "res_track.txt");
  return out;
}

std::string frame_file_name(std::string_view prefix, std::size_t index, std::string_view extension) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return std::string(prefix) + digits + std::string(extension);
}

void write_ctc_result(const fs::path& dir, std::span<const LabelMask> masks, std::span<const TrackRecord> tracks) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < masks.size(); ++t) write_label_mask(masks[t], dir / frame_file_name("mask", t));
  write_track_file(tracks, dir / "res_track.txt");
}

// ---------------------------------------------------------------------------
// Reports

std::string format_number(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, precision);
  if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "number too large to format");
  std::string out(buffer, ptr);
  if (out == "-0" || out.find_first_not_of("-0.") == std::string::npos) {
    if (out.front() == '-') out.erase(0, 1);
  }
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "CSV row has " + std::to_string(row.size()) + " fields, header has " +
                                                 std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  auto join = [](const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) line += ',';
      line += fields[i];
    }
    return line + '\n';
  };
  std::string out = join(header_);
  for (const auto& row : rows_) out += join(row);
  return out;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::set<std::string> seen;
  auto trim = [](std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return std::string_view{};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError::at_line(line_no, "expected key=value");
    const auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError::at_line(line_no, "empty key");
    if (!seen.insert(key).second) throw ParseError::at_line(line_no, "duplicate key '" + key + "'");
    out.emplace_back(key, std::string(trim(line.substr(eq + 1))));
  });
  return out;
}

std::string format_key_values(const KeyValues& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + '=' + v + '\n';
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

}  // namespace migtk
