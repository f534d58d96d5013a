#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "migtk/raster.hpp"
#include "migtk/tracks.hpp"

namespace migtk {

using Bytes = std::vector<std::uint8_t>;

enum class ImageFormat { kTiff, kPgm };

// Uncompressed single-channel TIFF (8/16-bit, either byte order, stripped,
// single page) and binary PGM (P5).
GrayFrame decode_image(std::span<const std::uint8_t> bytes, double pixel_size_um = kDefaultPixelSizeUm);
Bytes encode_image(const GrayFrame& frame, ImageFormat format);

// Format chosen by extension: .tif/.tiff or .pgm.
GrayFrame read_image(const std::filesystem::path& path, double pixel_size_um = kDefaultPixelSizeUm);
void write_image(const GrayFrame& frame, const std::filesystem::path& path);

// Masks are stored as 16-bit images; labels above 65535 are rejected.
LabelMask decode_label_mask(std::span<const std::uint8_t> bytes);
LabelMask read_label_mask(const std::filesystem::path& path);
void write_label_mask(const LabelMask& mask, const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// CTC track files: one "L B E P" record per non-empty line.

std::vector<TrackRecord> parse_track_file(std::string_view text);
std::string format_track_file(std::span<const TrackRecord> records);
std::vector<TrackRecord> read_track_file(const std::filesystem::path& path);
void write_track_file(std::span<const TrackRecord> records, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// CTC directory layout

inline constexpr double kDefaultFrameIntervalMin = 2.0;

// Files named <prefix><digits>.<ext>, keyed by frame index.
std::map<int, std::filesystem::path> list_indexed_files(const std::filesystem::path& dir, std::string_view prefix);

struct VideoDataset {
  std::filesystem::path root;
  std::vector<std::filesystem::path> frame_paths;  // frame t at index t
  int width = 0;
  int height = 0;
  int bit_depth = 16;
  double pixel_size_um = kDefaultPixelSizeUm;
  double frame_interval_min = kDefaultFrameIntervalMin;
  std::map<int, std::filesystem::path> seg_masks;  // SEG/man_seg<T>.tif
  std::map<int, std::filesystem::path> tra_masks;  // TRA/man_track<T>.tif
  std::optional<std::vector<TrackRecord>> tracks;  // TRA/man_track.txt

  std::size_t frame_count() const noexcept { return frame_paths.size(); }
  GrayFrame frame(std::size_t t) const;
  std::vector<GrayFrame> frames() const;
};

// Frames t<digits>.tif|.tiff|.pgm, numbered contiguously from 0, all of one size.
VideoDataset load_ctc_video(const std::filesystem::path& dir, double pixel_size_um = kDefaultPixelSizeUm,
                            double frame_interval_min = kDefaultFrameIntervalMin);

// Contiguous, equally sized mask series from 0: <prefix><T>.tif.
std::vector<LabelMask> load_mask_series(const std::filesystem::path& dir, std::string_view prefix);

// Result layout: mask<T>.tif plus res_track.txt.
struct CtcResult {
  std::vector<LabelMask> masks;
  std::optional<std::vector<TrackRecord>> tracks;
};

CtcResult load_ctc_result(const std::filesystem::path& dir);
void write_ctc_result(const std::filesystem::path& dir, std::span<const LabelMask> masks,
                      std::span<const TrackRecord> tracks);

std::string frame_file_name(std::string_view prefix, std::size_t index, std::string_view extension = ".tif");

// ---------------------------------------------------------------------------
// Reports and manifests

// Locale-independent fixed notation; infinities print as "inf".
std::string format_number(double value, int precision = 6);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "key=value" lines; blank lines and lines starting with '#' are skipped.
// Duplicate keys and lines without '=' are errors located by line number.
KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& entries);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string file_sha256(const std::filesystem::path& path);

}  // namespace migtk
