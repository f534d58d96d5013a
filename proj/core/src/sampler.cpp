#include "migtk/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace migtk {

double Rng::uniform() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "Rng::below requires n > 0");
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return std::min(k, n - 1);
}

SamplingDistribution SamplingDistribution::from_weights(int width, int height, std::vector<double> weights) {
  if (width < 1 || height < 1 ||
      weights.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::kInvalidInput, "sampling distribution needs a nonempty weight grid");
  }
  long double total = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::kInvalidArgument, "weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0L)) throw Error(ErrorKind::kInvalidArgument, "weights sum to zero");

  SamplingDistribution d;
  d.width_ = width;
  d.height_ = height;
  d.probabilities_ = std::move(weights);
  d.cumulative_.resize(d.probabilities_.size());
  long double running = 0.0L;
  for (std::size_t i = 0; i < d.probabilities_.size(); ++i) {
    d.probabilities_[i] = static_cast<double>(static_cast<long double>(d.probabilities_[i]) / total);
    running += d.probabilities_[i];
    d.cumulative_[i] = std::min(1.0, static_cast<double>(running));
  }
  // Pin the tail to exactly 1 from the last pixel with mass onwards.
  for (std::size_t i = d.cumulative_.size(); i-- > 0;) {
    d.cumulative_[i] = 1.0;
    if (d.probabilities_[i] > 0.0) break;
  }
  return d;
}

Pixel SamplingDistribution::locate(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto index = static_cast<std::size_t>(it - cumulative_.begin());
  index = std::min(index, cumulative_.size() - 1);
  return {static_cast<int>(index / static_cast<std::size_t>(width_)),
          static_cast<int>(index % static_cast<std::size_t>(width_))};
}

SamplingDistribution build_sampling_distribution(const BinaryMask& mask, double foreground_weight,
                                                 double background_weight) {
  if (mask.empty()) throw Error(ErrorKind::kInvalidInput, "cannot build a sampling distribution on an empty mask");
  if (!(foreground_weight > 0.0) || !(background_weight > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sampling weights must be positive");
  }
  std::vector<double> weights(mask.size());
  auto bits = mask.values();
  for (std::size_t i = 0; i < bits.size(); ++i) weights[i] = bits[i] ? foreground_weight : background_weight;
  return SamplingDistribution::from_weights(mask.width(), mask.height(), std::move(weights));
}

Pixel draw_centroid(const SamplingDistribution& distribution, Rng& rng) {
  return distribution.locate(rng.uniform());
}

Rect clamp_patch(const PatchSpec& spec, int image_width, int image_height) {
  if (spec.height < 1 || spec.width < 1) throw Error(ErrorKind::kInvalidArgument, "patch dimensions must be positive");
  if (spec.height > image_height || spec.width > image_width) {
    throw Error(ErrorKind::kInvalidArgument,
                "patch " + std::to_string(spec.height) + "x" + std::to_string(spec.width) + " exceeds image " +
                    std::to_string(image_height) + "x" + std::to_string(image_width));
  }
  Rect rect;
  rect.height = spec.height;
  rect.width = spec.width;
  rect.top = std::clamp(spec.center.row - spec.height / 2, 0, image_height - spec.height);
  rect.left = std::clamp(spec.center.col - spec.width / 2, 0, image_width - spec.width);
  return rect;
}

namespace {

template <typename R>
R crop(const R& in, const Rect& rect) {
  R out(rect.width, rect.height);
  for (int r = 0; r < rect.height; ++r)
    for (int c = 0; c < rect.width; ++c) out(r, c) = in(rect.top + r, rect.left + c);
  return out;
}

template <typename R>
R apply(const R& in, const AugmentationOp& op) {
  switch (op.kind) {
    case AugmentationOp::Kind::kFlipHorizontal: return flip_horizontal(in);
    case AugmentationOp::Kind::kFlipVertical: return flip_vertical(in);
    case AugmentationOp::Kind::kRotate90: return rotate90(in, op.quarter_turns);
  }
  return in;
}

}  // namespace

Patch crop_patch(std::span<const NormalizedFrame> frames, const LabelMask& mask, const PatchSpec& spec) {
  for (const auto& f : frames) {
    if (!f.same_shape(mask)) throw Error(ErrorKind::kDimensionMismatch, "frames and mask must share dimensions");
  }
  Patch patch;
  patch.rect = clamp_patch(spec, mask.width(), mask.height());
  patch.frames.reserve(frames.size());
  for (const auto& f : frames) patch.frames.push_back(crop(f, patch.rect));
  patch.mask = crop(mask, patch.rect);
  return patch;
}

std::string_view to_string(const AugmentationOp& op) {
  switch (op.kind) {
    case AugmentationOp::Kind::kFlipHorizontal: return "hflip";
    case AugmentationOp::Kind::kFlipVertical: return "vflip";
    case AugmentationOp::Kind::kRotate90:
      switch (((op.quarter_turns % 4) + 4) % 4) {
        case 1: return "rot90";
        case 2: return "rot180";
        case 3: return "rot270";
        default: return "identity";
      }
  }
  return "identity";
}

AugmentationOp random_augmentation(Rng& rng) {
  const auto pick = rng.below(6);
  if (pick < 4) return {AugmentationOp::Kind::kRotate90, static_cast<int>(pick)};
  if (pick == 4) return {AugmentationOp::Kind::kFlipHorizontal, 0};
  return {AugmentationOp::Kind::kFlipVertical, 0};
}

AugmentedSample augment(std::span<const NormalizedFrame> frames, const LabelMask& mask, const AugmentationOp& op) {
  AugmentedSample out;
  out.frames.reserve(frames.size());
  for (const auto& f : frames) out.frames.push_back(apply(f, op));
  out.mask = apply(mask, op);
  return out;
}

SampledPatch sample_patch(std::span<const NormalizedFrame> frames, const LabelMask& mask, int patch_height,
                          int patch_width, double foreground_weight, double background_weight, Rng& rng) {
  SampledPatch result;
  result.op = random_augmentation(rng);
  auto transformed = augment(frames, mask, result.op);
  const auto distribution = build_sampling_distribution(transformed.mask.foreground(), foreground_weight,
                                                        background_weight);
  result.draw_index = rng.draws();
  result.center = draw_centroid(distribution, rng);
  PatchSpec spec;
  spec.center = result.center;
  spec.height = patch_height;
  spec.width = patch_width;
  spec.frame_window = static_cast<int>(frames.size());
  result.patch = crop_patch(transformed.frames, transformed.mask, spec);
  return result;
}

}  // namespace migtk
