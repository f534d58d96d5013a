#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "migtk/error.hpp"

namespace migtk {

inline constexpr double kDefaultPixelSizeUm = 0.802;

struct Pixel {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Row-major 2-D grid. A default-constructed raster is 0x0 ("empty").
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorKind::kInvalidArgument, "raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Raster(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorKind::kInvalidArgument, "raster data size does not match dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  bool contains(Pixel p) const noexcept { return contains(p.row, p.col); }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }
  Pixel pixel(std::size_t index) const noexcept {
    return {static_cast<int>(index / static_cast<std::size_t>(width_)),
            static_cast<int>(index % static_cast<std::size_t>(width_))};
  }

  T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  T& operator[](Pixel p) noexcept { return data_[index(p.row, p.col)]; }
  const T& operator[](Pixel p) const noexcept { return data_[index(p.row, p.col)]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

class BinaryMask : public Raster<std::uint8_t> {
 public:
  using Raster::Raster;
  explicit BinaryMask(Raster<std::uint8_t> raster) : Raster(std::move(raster)) {}

  bool foreground(int row, int col) const noexcept { return (*this)(row, col) != 0; }
  std::size_t count() const noexcept;
};

class LabelMask : public Raster<std::uint32_t> {
 public:
  using Raster::Raster;
  explicit LabelMask(Raster<std::uint32_t> raster) : Raster(std::move(raster)) {}

  BinaryMask foreground() const;
  // Sorted distinct positive labels.
  std::vector<std::uint32_t> labels() const;
  std::uint32_t max_label() const noexcept;
};

// Single-channel microscope intensities with spatial calibration.
class GrayFrame {
 public:
  GrayFrame() = default;
  GrayFrame(Raster<std::uint16_t> intensities, int bit_depth, double pixel_size_um = kDefaultPixelSizeUm);

  int width() const noexcept { return pixels_.width(); }
  int height() const noexcept { return pixels_.height(); }
  int bit_depth() const noexcept { return bit_depth_; }
  double pixel_size() const noexcept { return pixel_size_; }
  std::uint32_t max_value() const noexcept { return (1u << bit_depth_) - 1u; }

  const Raster<std::uint16_t>& pixels() const noexcept { return pixels_; }
  std::uint16_t operator()(int row, int col) const noexcept { return pixels_(row, col); }

  friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

 private:
  Raster<std::uint16_t> pixels_;
  int bit_depth_ = 16;
  double pixel_size_ = kDefaultPixelSizeUm;
};

class NormalizedFrame : public Raster<double> {
 public:
  using Raster::Raster;
  explicit NormalizedFrame(Raster<double> raster);
};

enum class Connectivity { kFour = 4, kEight = 8 };

// Nearest-rank percentile of the intensity multiset, p in [0, 100].
double percentile_nearest_rank(std::span<const double> values, double percent);

// clamp((I - a) / (b - a), 0, 1) with a, b the p_lo / p_hi nearest-rank
// percentiles; a == b yields all zeros.
NormalizedFrame normalize_percentile(const GrayFrame& frame, double p_lo = 0.1, double p_hi = 99.1);
NormalizedFrame normalize_percentile(const NormalizedFrame& frame, double p_lo, double p_hi);

// Labels 1..n assigned in raster order of each component's first pixel.
LabelMask connected_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::kEight);

std::vector<Pixel> region_pixels(const LabelMask& mask, std::uint32_t label);

// Dihedral transforms. rotate90 turns counter-clockwise `quarter_turns` times.
template <typename R>
R flip_horizontal(const R& in) {
  R out = in;
  for (int r = 0; r < in.height(); ++r)
    for (int c = 0; c < in.width(); ++c) out(r, c) = in(r, in.width() - 1 - c);
  return out;
}

template <typename R>
R flip_vertical(const R& in) {
  R out = in;
  for (int r = 0; r < in.height(); ++r)
    for (int c = 0; c < in.width(); ++c) out(r, c) = in(in.height() - 1 - r, c);
  return out;
}

template <typename R>
R rotate90(const R& in, int quarter_turns) {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  if (turns == 0) return in;
  if (turns == 2) return flip_vertical(flip_horizontal(in));
  R out(in.height(), in.width());
  for (int r = 0; r < in.height(); ++r) {
    for (int c = 0; c < in.width(); ++c) {
      if (turns == 1) {
        out(in.width() - 1 - c, r) = in(r, c);
      } else {
        out(c, in.height() - 1 - r) = in(r, c);
      }
    }
  }
  return out;
}

// Where pixel `p` of a (width x height) raster lands under the transforms above.
Pixel flip_horizontal(Pixel p, int width, int height);
Pixel flip_vertical(Pixel p, int width, int height);
Pixel rotate90(Pixel p, int width, int height, int quarter_turns);

}  // namespace migtk
