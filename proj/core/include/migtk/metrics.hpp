#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "migtk/raster.hpp"
#include "migtk/tracks.hpp"

namespace migtk {

// |X n Y| / |X u Y|; 1 when both are empty.
double jaccard(const BinaryMask& x, const BinaryMask& y);

enum class SegMatchRule {
  // Result object must cover more than half of the ground-truth object.
  kCtcStandard,
  // Ground-truth object must cover more than half of the result object.
  kInvertedCompat,
};

struct ObjectScore {
  std::uint32_t gt_label = 0;
  std::uint32_t res_label = 0;  // 0 when unmatched
  double score = 0.0;
};

std::vector<ObjectScore> seg_frame(const LabelMask& gt, const LabelMask& res,
                                   SegMatchRule rule = SegMatchRule::kCtcStandard);

// A video's ground-truth frames paired with the result masks for the same frames.
struct SegVideo {
  std::vector<LabelMask> gt;
  std::vector<LabelMask> res;
};

struct SegVideoScore {
  double seg = 0.0;
  std::size_t objects = 0;
  double score_sum = 0.0;
};

SegVideoScore seg_video(const SegVideo& video, SegMatchRule rule = SegMatchRule::kCtcStandard);

struct SegDatasetReport {
  std::vector<SegVideoScore> videos;
  std::vector<std::size_t> excluded;  // indices of videos with no GT objects
  double mean_seg = 0.0;              // unweighted mean over included videos
  double pooled_seg = 0.0;            // mean over all GT objects of all videos
};

SegDatasetReport seg_dataset(std::span<const SegVideo> videos, SegMatchRule rule = SegMatchRule::kCtcStandard);

// ---------------------------------------------------------------------------
// Lineage graphs and AOGM

enum class EdgeKind { kTrack, kParent };

struct LineageNode {
  std::uint32_t label = 0;
  int frame = 0;
  std::vector<std::uint32_t> pixels;  // sorted raster indices
};

struct LineageEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeKind kind = EdgeKind::kTrack;
};

class LineageGraph {
 public:
  LineageGraph() = default;
  LineageGraph(int width, int height, int frame_count);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int frame_count() const noexcept { return frame_count_; }

  const std::vector<LineageNode>& nodes() const noexcept { return nodes_; }
  const std::vector<LineageEdge>& edges() const noexcept { return edges_; }

  // Throws kStructural on a duplicate (label, frame), an out-of-range frame,
  // or a region overlapping another node of the same frame.
  std::size_t add_node(std::uint32_t label, int frame, std::vector<std::uint32_t> pixels);
  // Kind follows from the labels: same label is a track edge, otherwise parent.
  void add_edge(std::size_t from, std::size_t to);

  std::size_t find(std::uint32_t label, int frame) const;  // npos if absent
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  // Copy with one node and its incident edges removed.
  LineageGraph without_node(std::size_t node) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int frame_count_ = 0;
  std::vector<LineageNode> nodes_;
  std::vector<LineageEdge> edges_;
  std::map<std::pair<int, std::uint32_t>, std::size_t> index_;
};

LineageGraph build_graph(std::span<const LabelMask> masks, std::span<const TrackRecord> tracks);

struct AogmWeights {
  double ns = 5.0;
  double fn = 10.0;
  double fp = 1.0;
  double ed = 1.0;
  double ea = 1.5;
  double ec = 1.0;
};

struct AogmCounts {
  std::size_t ns = 0;  // extra GT nodes per split result node
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t ed = 0;
  std::size_t ea = 0;
  std::size_t ec = 0;

  friend bool operator==(const AogmCounts&, const AogmCounts&) = default;
};

struct AogmResult {
  double aogm_d = 0.0;
  double aogm_0 = 0.0;
  AogmCounts counts;
};

AogmResult aogm(const LineageGraph& gt, const LineageGraph& res, const AogmWeights& weights = {});

// 1 - min(AOGM_D, AOGM_0) / AOGM_0.
double tra(const AogmResult& result);
double tra(const LineageGraph& gt, const LineageGraph& res, const AogmWeights& weights = {});

double mean(std::span<const double> values);

// ---------------------------------------------------------------------------
// Reference numerics for the training loss and optimizer.

// -sum x_i ln y_i; +inf when some y_i = 0 carries x_i > 0.
double cross_entropy(std::span<const double> target, std::span<const double> predicted);

struct AdamMoments {
  double m = 0.0;
  double v = 0.0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;

AdamMoments adam_moments(double m_prev, double v_prev, double gradient, double beta1 = kAdamBeta1,
                         double beta2 = kAdamBeta2);

}  // namespace migtk
