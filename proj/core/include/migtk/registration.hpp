#pragma once

#include <span>
#include <vector>

#include "migtk/raster.hpp"
#include "migtk/sampler.hpp"

namespace migtk {

// Integer translation: content of the moving frame sits at reference + (dy, dx).
struct Shift {
  int dy = 0;
  int dx = 0;

  friend bool operator==(const Shift&, const Shift&) = default;
  Shift operator+(const Shift& o) const { return {dy + o.dy, dx + o.dx}; }
};

struct DriftEstimate {
  int dy = 0;
  int dx = 0;
  double score = 0.0;  // zero-normalized cross-correlation on the overlap, in [-1, 1]

  Shift shift() const { return {dy, dx}; }
};

// Exhaustive search over [-max_shift, max_shift]^2 maximizing the
// zero-normalized cross-correlation of the overlapping region. Ties go to
// the smallest |dy|+|dx|, then lexicographically smallest (dy, dx).
DriftEstimate estimate_shift(const GrayFrame& reference, const GrayFrame& moving, int max_shift);

struct RegisteredVideo {
  std::vector<GrayFrame> frames;
  std::vector<DriftEstimate> pairwise;  // pairwise[t] aligns frame t to t-1; pairwise[0] is (0,0,1)
  std::vector<Shift> cumulative;        // cumulative[t] = sum of pairwise[1..t]
  Rect crop;                            // in frame-0 coordinates
};

// Crop in frame-0 coordinates that keeps only pixels inside the field of view
// of every frame, given per-frame cumulative displacements.
Rect common_crop(int width, int height, std::span<const Shift> cumulative);

// out_t(p) = frame_t(p + crop.origin + cumulative[t]).
GrayFrame apply_registration(const GrayFrame& frame, Shift cumulative, const Rect& crop);
LabelMask apply_registration(const LabelMask& mask, Shift cumulative, const Rect& crop);

RegisteredVideo register_video(std::span<const GrayFrame> frames, int max_shift);

}  // namespace migtk
