#include "migtk/raster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace migtk {

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(values().begin(), values().end(), [](auto v) { return v != 0; }));
}

BinaryMask LabelMask::foreground() const {
  BinaryMask out(width(), height());
  auto src = values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0 ? 1 : 0;
  return out;
}

std::vector<std::uint32_t> LabelMask::labels() const {
  std::vector<std::uint32_t> out;
  for (auto v : values())
    if (v > 0) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint32_t LabelMask::max_label() const noexcept {
  std::uint32_t best = 0;
  for (auto v : values()) best = std::max(best, v);
  return best;
}

GrayFrame::GrayFrame(Raster<std::uint16_t> intensities, int bit_depth, double pixel_size_um)
    : pixels_(std::move(intensities)), bit_depth_(bit_depth), pixel_size_(pixel_size_um) {
  if (pixels_.width() < 1 || pixels_.height() < 1) {
    throw Error(ErrorKind::kInvalidInput, "gray frame must be at least 1x1");
  }
  if (bit_depth_ != 8 && bit_depth_ != 16) {
    throw Error(ErrorKind::kInvalidArgument, "bit depth must be 8 or 16, got " + std::to_string(bit_depth_));
  }
  if (!(pixel_size_ > 0.0) || !std::isfinite(pixel_size_)) {
    throw Error(ErrorKind::kInvalidArgument, "pixel size must be positive");
  }
  const auto limit = max_value();
  for (auto v : pixels_.values()) {
    if (v > limit) {
      throw Error(ErrorKind::kInvalidInput,
                  "intensity " + std::to_string(v) + " exceeds " + std::to_string(bit_depth_) + "-bit range");
    }
  }
}

NormalizedFrame::NormalizedFrame(Raster<double> raster) : Raster(std::move(raster)) {
  for (double v : values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::kInvalidInput, "normalized values must lie in [0,1]");
  }
}

double percentile_nearest_rank(std::span<const double> values, double percent) {
  if (values.empty()) throw Error(ErrorKind::kInvalidInput, "percentile of an empty set");
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw Error(ErrorKind::kInvalidArgument, "percentile must lie in [0,100]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  const auto n = sorted.size();
  // rank = ceil(p/100 * n), at least 1
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

namespace {

NormalizedFrame rescale(int width, int height, std::span<const double> values, double p_lo, double p_hi) {
  if (values.empty()) throw Error(ErrorKind::kInvalidInput, "cannot normalize an empty frame");
  if (!(p_lo >= 0.0 && p_lo < p_hi && p_hi <= 100.0)) {
    throw Error(ErrorKind::kInvalidArgument, "percentiles must satisfy 0 <= p_lo < p_hi <= 100");
  }
  const double lo = percentile_nearest_rank(values, p_lo);
  const double hi = percentile_nearest_rank(values, p_hi);
  Raster<double> out(width, height, 0.0);
  if (hi > lo) {
    auto dst = out.values();
    const double span = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) dst[i] = std::clamp((values[i] - lo) / span, 0.0, 1.0);
  }
  return NormalizedFrame(std::move(out));
}

}  // namespace

NormalizedFrame normalize_percentile(const GrayFrame& frame, double p_lo, double p_hi) {
  const auto src = frame.pixels().values();
  std::vector<double> values(src.begin(), src.end());
  return rescale(frame.width(), frame.height(), values, p_lo, p_hi);
}

NormalizedFrame normalize_percentile(const NormalizedFrame& frame, double p_lo, double p_hi) {
  return rescale(frame.width(), frame.height(), frame.values(), p_lo, p_hi);
}

LabelMask connected_components(const BinaryMask& mask, Connectivity connectivity) {
  LabelMask out(mask.width(), mask.height(), 0u);
  static constexpr int kDr[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int kDc[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  const int neighbours = connectivity == Connectivity::kFour ? 4 : 8;
  std::uint32_t next = 0;
  std::deque<Pixel> queue;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.foreground(r, c) || out(r, c) != 0) continue;
      const std::uint32_t label = ++next;
      out(r, c) = label;
      queue.push_back({r, c});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        for (int k = 0; k < neighbours; ++k) {
          const int nr = p.row + kDr[k];
          const int nc = p.col + kDc[k];
          if (!mask.contains(nr, nc) || !mask.foreground(nr, nc) || out(nr, nc) != 0) continue;
          out(nr, nc) = label;
          queue.push_back({nr, nc});
        }
      }
    }
  }
  return out;
}

std::vector<Pixel> region_pixels(const LabelMask& mask, std::uint32_t label) {
  if (label == 0) throw Error(ErrorKind::kInvalidArgument, "label 0 is background, not a region");
  std::vector<Pixel> out;
  for (int r = 0; r < mask.height(); ++r)
    for (int c = 0; c < mask.width(); ++c)
      if (mask(r, c) == label) out.push_back({r, c});
  return out;
}

Pixel flip_horizontal(Pixel p, int width, int /*height*/) { return {p.row, width - 1 - p.col}; }

Pixel flip_vertical(Pixel p, int /*width*/, int height) { return {height - 1 - p.row, p.col}; }

Pixel rotate90(Pixel p, int width, int height, int quarter_turns) {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  switch (turns) {
    case 1: return {width - 1 - p.col, p.row};
    case 2: return {height - 1 - p.row, width - 1 - p.col};
    case 3: return {p.col, height - 1 - p.row};
    default: return p;
  }
}

}  // namespace migtk
