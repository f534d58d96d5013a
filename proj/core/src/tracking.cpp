#include "migtk/tracking.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

namespace migtk {

namespace {

struct Candidate {
  double iou;
  std::uint32_t prev;
  std::uint32_t cur;
};

}  // namespace

LinkedVideo link_by_overlap(std::span<const LabelMask> masks, double min_iou) {
  if (!(min_iou >= 0.0 && min_iou <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "min_iou must lie in [0,1]");
  for (std::size_t t = 1; t < masks.size(); ++t) {
    if (!masks[t].same_shape(masks[0])) {
      throw Error(ErrorKind::kDimensionMismatch, "mask frame " + std::to_string(t) + " differs in size from frame 0");
    }
  }
  LinkedVideo out;
  out.masks.reserve(masks.size());
  std::map<std::uint32_t, std::uint32_t> prev_track;  // input label in t-1 -> track id
  std::map<std::uint32_t, std::size_t> prev_area;

  for (std::size_t t = 0; t < masks.size(); ++t) {
    const auto& cur = masks[t];
    std::map<std::uint32_t, std::size_t> area;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> overlap;
    const auto v = cur.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i]) continue;
      ++area[v[i]];
      if (t > 0) {
        const auto p = masks[t - 1].values()[i];
        if (p) ++overlap[{p, v[i]}];
      }
    }

    std::vector<Candidate> candidates;
    for (const auto& [key, ov] : overlap) {
      const double iou = static_cast<double>(ov) / static_cast<double>(prev_area[key.first] + area[key.second] - ov);
      if (iou > 0.0 && iou >= min_iou) candidates.push_back({iou, key.first, key.second});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(b.iou, a.prev, a.cur) < std::tie(a.iou, b.prev, b.cur);
    });

    std::map<std::uint32_t, std::uint32_t> assigned;  // current label -> track id
    std::map<std::uint32_t, bool> prev_used;
    for (const auto& c : candidates) {
      if (prev_used[c.prev] || assigned.count(c.cur)) continue;
      prev_used[c.prev] = true;
      const std::uint32_t track = prev_track.at(c.prev);
      assigned[c.cur] = track;
      out.tracks[track - 1].end_frame = static_cast<int>(t);
    }
    for (const auto& [label, a] : area) {
      if (assigned.count(label)) continue;
      const auto track = static_cast<std::uint32_t>(out.tracks.size() + 1);
      out.tracks.push_back({track, static_cast<int>(t), static_cast<int>(t), 0});
      assigned[label] = track;
    }

    LabelMask relabeled(cur.width(), cur.height(), 0u);
    auto dst = relabeled.values();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i]) dst[i] = assigned.at(v[i]);
    out.masks.push_back(std::move(relabeled));
    prev_track = std::move(assigned);
    prev_area = std::move(area);
  }
  return out;
}

}  // namespace migtk
