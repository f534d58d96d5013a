#include "migtk/registration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "migtk/parallel.hpp"

namespace migtk {

namespace {

bool has_variance(const GrayFrame& frame) {
  const auto v = frame.pixels().values();
  return std::any_of(v.begin(), v.end(), [first = v.front()](auto x) { return x != first; });
}

// NaN when either side of the overlap is flat.
double overlap_zncc(const GrayFrame& reference, const GrayFrame& moving, int dy, int dx) {
  const int h = reference.height();
  const int w = reference.width();
  const int r0 = std::max(0, -dy), r1 = std::min(h, h - dy);
  const int c0 = std::max(0, -dx), c1 = std::min(w, w - dx);
  if (r1 <= r0 || c1 <= c0) return std::numeric_limits<double>::quiet_NaN();
  std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  const auto& ref = reference.pixels();
  const auto& mov = moving.pixels();
  for (int r = r0; r < r1; ++r) {
    const std::uint16_t* a = &ref(r, c0);
    const std::uint16_t* b = &mov(r + dy, c0 + dx);
    std::int64_t row_a = 0, row_b = 0, row_aa = 0, row_bb = 0, row_ab = 0;
    for (int k = 0, n = c1 - c0; k < n; ++k) {
      const std::int64_t x = a[k], y = b[k];
      row_a += x;
      row_b += y;
      row_aa += x * x;
      row_bb += y * y;
      row_ab += x * y;
    }
    sa += row_a;
    sb += row_b;
    saa += row_aa;
    sbb += row_bb;
    sab += row_ab;
  }
  const __int128 n = static_cast<__int128>(r1 - r0) * (c1 - c0);
  const __int128 cov = n * sab - static_cast<__int128>(sa) * sb;
  const __int128 va = n * saa - static_cast<__int128>(sa) * sa;
  const __int128 vb = n * sbb - static_cast<__int128>(sb) * sb;
  if (va <= 0 || vb <= 0) return std::numeric_limits<double>::quiet_NaN();
  const double score = static_cast<double>(cov) / std::sqrt(static_cast<double>(va) * static_cast<double>(vb));
  return std::clamp(score, -1.0, 1.0);
}

bool better(const DriftEstimate& candidate, const DriftEstimate& best) {
  if (candidate.score != best.score) return candidate.score > best.score;
  const int lc = std::abs(candidate.dy) + std::abs(candidate.dx);
  const int lb = std::abs(best.dy) + std::abs(best.dx);
  if (lc != lb) return lc < lb;
  if (candidate.dy != best.dy) return candidate.dy < best.dy;
  return candidate.dx < best.dx;
}

}  // namespace

DriftEstimate estimate_shift(const GrayFrame& reference, const GrayFrame& moving, int max_shift) {
  if (reference.width() != moving.width() || reference.height() != moving.height()) {
    throw Error(ErrorKind::kDimensionMismatch, "frames to register must share dimensions");
  }
  if (max_shift < 0) throw Error(ErrorKind::kInvalidArgument, "max_shift must be >= 0");
  if (!has_variance(reference) || !has_variance(moving)) {
    throw Error(ErrorKind::kDegenerateInput, "zero-variance frame: correlation undefined");
  }
  const int sy = std::min(max_shift, reference.height() - 1);
  const int sx = std::min(max_shift, reference.width() - 1);
  const int span_y = 2 * sy + 1, span_x = 2 * sx + 1;
  std::vector<double> scores(static_cast<std::size_t>(span_y) * static_cast<std::size_t>(span_x));
  parallel_for(static_cast<std::size_t>(span_y), [&](std::size_t iy) {
    const int dy = static_cast<int>(iy) - sy;
    for (int ix = 0; ix < span_x; ++ix) {
      scores[iy * static_cast<std::size_t>(span_x) + static_cast<std::size_t>(ix)] =
          overlap_zncc(reference, moving, dy, ix - sx);
    }
  });
  DriftEstimate best{0, 0, -std::numeric_limits<double>::infinity()};
  bool found = false;
  for (int iy = 0; iy < span_y; ++iy) {
    for (int ix = 0; ix < span_x; ++ix) {
      const double s = scores[static_cast<std::size_t>(iy) * static_cast<std::size_t>(span_x) + static_cast<std::size_t>(ix)];
      if (std::isnan(s)) continue;
      const DriftEstimate candidate{iy - sy, ix - sx, s};
      if (!found || better(candidate, best)) {
        best = candidate;
        found = true;
      }
    }
  }
  if (!found) throw Error(ErrorKind::kDegenerateInput, "no shift in the search window has a textured overlap");
  return best;
}

Rect common_crop(int width, int height, std::span<const Shift> cumulative) {
  int min_dy = 0, max_dy = 0, min_dx = 0, max_dx = 0;
  for (const auto& s : cumulative) {
    min_dy = std::min(min_dy, s.dy);
    max_dy = std::max(max_dy, s.dy);
    min_dx = std::min(min_dx, s.dx);
    max_dx = std::max(max_dx, s.dx);
  }
  Rect rect;
  rect.top = -min_dy;
  rect.left = -min_dx;
  rect.height = height - (max_dy - min_dy);
  rect.width = width - (max_dx - min_dx);
  if (rect.height < 1 || rect.width < 1) {
    throw Error(ErrorKind::kDegenerateInput, "accumulated drift leaves no common field of view");
  }
  return rect;
}

namespace {

template <typename R>
R shift_crop(const R& in, Shift cumulative, const Rect& crop) {
  R out(crop.width, crop.height);
  for (int r = 0; r < crop.height; ++r) {
    for (int c = 0; c < crop.width; ++c) {
      const int sr = crop.top + r + cumulative.dy;
      const int sc = crop.left + c + cumulative.dx;
      if (!in.contains(sr, sc)) throw Error(ErrorKind::kInvalidArgument, "crop leaves the source field of view");
      out(r, c) = in(sr, sc);
    }
  }
  return out;
}

}  // namespace

GrayFrame apply_registration(const GrayFrame& frame, Shift cumulative, const Rect& crop) {
  return GrayFrame(shift_crop(frame.pixels(), cumulative, crop), frame.bit_depth(), frame.pixel_size());
}

LabelMask apply_registration(const LabelMask& mask, Shift cumulative, const Rect& crop) {
  return shift_crop(mask, cumulative, crop);
}

RegisteredVideo register_video(std::span<const GrayFrame> frames, int max_shift) {
  if (frames.size() < 2) throw Error(ErrorKind::kInvalidInput, "registration needs at least 2 frames");
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (frames[t].width() != frames[0].width() || frames[t].height() != frames[0].height()) {
      throw Error(ErrorKind::kDimensionMismatch, "frame " + std::to_string(t) + " differs in size from frame 0");
    }
  }
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (!has_variance(frames[t])) {
      throw Error(ErrorKind::kDegenerateInput, "frame " + std::to_string(t) + " has zero variance");
    }
  }
  RegisteredVideo out;
  out.pairwise.resize(frames.size());
  out.pairwise[0] = {0, 0, 1.0};
  for (std::size_t t = 1; t < frames.size(); ++t) {
    try {
      out.pairwise[t] = estimate_shift(frames[t - 1], frames[t], max_shift);
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + std::to_string(t) + ": " + e.what());
    }
  }
  out.cumulative.resize(frames.size());
  for (std::size_t t = 1; t < frames.size(); ++t) out.cumulative[t] = out.cumulative[t - 1] + out.pairwise[t].shift();
  out.crop = common_crop(frames[0].width(), frames[0].height(), out.cumulative);
  out.frames.resize(frames.size());
  parallel_for(frames.size(), [&](std::size_t t) {
    out.frames[t] = apply_registration(frames[t], out.cumulative[t], out.crop);
  });
  return out;
}

}  // namespace migtk
