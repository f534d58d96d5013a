#pragma once

#include <span>
#include <vector>

#include "migtk/raster.hpp"
#include "migtk/tracks.hpp"

namespace migtk {

struct LinkedVideo {
  std::vector<LabelMask> masks;  // relabeled with track ids
  std::vector<TrackRecord> tracks;
};

// Greedy frame-to-frame linking: candidate pairs (object in t-1, object in t)
// are visited by descending IoU and accepted while both are free and
// IoU >= min_iou (and IoU > 0). Unlinked objects start new tracks; divisions
// are not detected, so every parent is 0.
LinkedVideo link_by_overlap(std::span<const LabelMask> masks, double min_iou = 0.3);

}  // namespace migtk
