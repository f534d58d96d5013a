#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "migtk/raster.hpp"

namespace migtk {

inline constexpr double kDefaultForegroundWeight = 50000.0;
inline constexpr double kDefaultBackgroundWeight = 1.0;
inline constexpr int kDefaultPatchSize = 256;
inline constexpr int kDefaultFrameWindow = 5;

// Seedable generator with a platform-independent output stream. The uniform
// variate is built from the top 53 bits of the engine output instead of
// std::uniform_real_distribution, whose algorithm is implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  // Uniform on [0, 1).
  double uniform();
  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

class SamplingDistribution {
 public:
  // Normalizes arbitrary non-negative weights; at least one must be positive.
  static SamplingDistribution from_weights(int width, int height, std::vector<double> weights);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double probability(int row, int col) const noexcept {
    return probabilities_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col)];
  }
  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  // Inverse-CDF lookup: first pixel whose cumulative mass exceeds u.
  Pixel locate(double u) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

SamplingDistribution build_sampling_distribution(const BinaryMask& mask,
                                                 double foreground_weight = kDefaultForegroundWeight,
                                                 double background_weight = kDefaultBackgroundWeight);

// One uniform variate per call.
Pixel draw_centroid(const SamplingDistribution& distribution, Rng& rng);

struct Rect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct PatchSpec {
  Pixel center;
  int height = kDefaultPatchSize;
  int width = kDefaultPatchSize;
  int frame_window = kDefaultFrameWindow;
};

// The patch rectangle centered on spec.center, shifted so it lies inside the image.
Rect clamp_patch(const PatchSpec& spec, int image_width, int image_height);

struct Patch {
  std::vector<NormalizedFrame> frames;
  LabelMask mask;
  Rect rect;
};

Patch crop_patch(std::span<const NormalizedFrame> frames, const LabelMask& mask, const PatchSpec& spec);

struct AugmentationOp {
  enum class Kind { kFlipHorizontal, kFlipVertical, kRotate90 };
  Kind kind = Kind::kRotate90;
  int quarter_turns = 0;  // only for kRotate90

  friend bool operator==(const AugmentationOp&, const AugmentationOp&) = default;
};

std::string_view to_string(const AugmentationOp& op);

// Uniform over {identity, rot90, rot180, rot270, hflip, vflip}.
AugmentationOp random_augmentation(Rng& rng);

struct AugmentedSample {
  std::vector<NormalizedFrame> frames;
  LabelMask mask;
};

AugmentedSample augment(std::span<const NormalizedFrame> frames, const LabelMask& mask, const AugmentationOp& op);

// augment -> build distribution on the transformed mask -> draw -> crop.
struct SampledPatch {
  Patch patch;
  AugmentationOp op;
  Pixel center;
  std::uint64_t draw_index = 0;
};

SampledPatch sample_patch(std::span<const NormalizedFrame> frames, const LabelMask& mask, int patch_height,
                          int patch_width, double foreground_weight, double background_weight, Rng& rng);

}  // namespace migtk
