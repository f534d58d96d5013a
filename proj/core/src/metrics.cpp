#include "migtk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace migtk {

double jaccard(const BinaryMask& x, const BinaryMask& y) {
  if (!x.same_shape(y)) throw Error(ErrorKind::kDimensionMismatch, "jaccard: masks differ in size");
  std::size_t inter = 0, uni = 0;
  const auto a = x.values(), b = y.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool p = a[i] != 0, q = b[i] != 0;
    inter += p && q;
    uni += p || q;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct OverlapTable {
  std::unordered_map<std::uint32_t, std::size_t> gt_area;
  std::unordered_map<std::uint32_t, std::size_t> res_area;
  // gt label -> (res label -> overlap)
  std::unordered_map<std::uint32_t, std::map<std::uint32_t, std::size_t>> overlap;
};

OverlapTable tabulate(const LabelMask& gt, const LabelMask& res) {
  OverlapTable t;
  const auto g = gt.values(), r = res.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i]) ++t.gt_area[g[i]];
    if (r[i]) ++t.res_area[r[i]];
    if (g[i] && r[i]) ++t.overlap[g[i]][r[i]];
  }
  return t;
}

}  // namespace

std::vector<ObjectScore> seg_frame(const LabelMask& gt, const LabelMask& res, SegMatchRule rule) {
  if (!gt.same_shape(res)) throw Error(ErrorKind::kDimensionMismatch, "seg: masks differ in size");
  const auto table = tabulate(gt, res);
  std::vector<ObjectScore> scores;
  for (std::uint32_t g : gt.labels()) {
    ObjectScore s{g, 0, 0.0};
    const std::size_t g_area = table.gt_area.at(g);
    std::size_t best_overlap = 0;
    if (auto it = table.overlap.find(g); it != table.overlap.end()) {
      for (const auto& [r, ov] : it->second) {
        const bool covers = rule == SegMatchRule::kCtcStandard ? 2 * ov > g_area : 2 * ov > table.res_area.at(r);
        if (covers && ov > best_overlap) {
          best_overlap = ov;
          s.res_label = r;
        }
      }
    }
    if (s.res_label != 0) {
      const std::size_t uni = g_area + table.res_area.at(s.res_label) - best_overlap;
      s.score = static_cast<double>(best_overlap) / static_cast<double>(uni);
    }
    scores.push_back(s);
  }
  return scores;
}

SegVideoScore seg_video(const SegVideo& video, SegMatchRule rule) {
  if (video.gt.size() != video.res.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "seg: ground truth and result frame counts differ");
  }
  SegVideoScore out;
  for (std::size_t t = 0; t < video.gt.size(); ++t) {
    for (const auto& s : seg_frame(video.gt[t], video.res[t], rule)) {
      out.score_sum += s.score;
      ++out.objects;
    }
  }
  out.seg = out.objects ? out.score_sum / static_cast<double>(out.objects) : 0.0;
  return out;
}

SegDatasetReport seg_dataset(std::span<const SegVideo> videos, SegMatchRule rule) {
  if (videos.empty()) throw Error(ErrorKind::kInvalidInput, "seg: no videos given");
  SegDatasetReport report;
  std::vector<double> per_video;
  double pooled_sum = 0.0;
  std::size_t pooled_objects = 0;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    report.videos.push_back(seg_video(videos[i], rule));
    const auto& v = report.videos.back();
    if (v.objects == 0) {
      report.excluded.push_back(i);
      continue;
    }
    per_video.push_back(v.seg);
    pooled_sum += v.score_sum;
    pooled_objects += v.objects;
  }
  if (per_video.empty()) throw Error(ErrorKind::kUndefinedMetric, "seg: no video has ground-truth objects");
  report.mean_seg = mean(per_video);
  report.pooled_seg = pooled_sum / static_cast<double>(pooled_objects);
  return report;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kUndefinedMetric, "mean of an empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------

LineageGraph::LineageGraph(int width, int height, int frame_count)
    : width_(width), height_(height), frame_count_(frame_count) {
  if (width < 0 || height < 0 || frame_count < 0) {
    throw Error(ErrorKind::kInvalidArgument, "lineage graph dimensions must be non-negative");
  }
}

std::size_t LineageGraph::add_node(std::uint32_t label, int frame, std::vector<std::uint32_t> pixels) {
  const std::string where = "node (" + std::to_string(label) + ", frame " + std::to_string(frame) + ")";
  if (label == 0) throw Error(ErrorKind::kStructural, where + ": label must be positive");
  if (frame < 0 || frame >= frame_count_) throw Error(ErrorKind::kStructural, where + ": frame out of range");
  if (pixels.empty()) throw Error(ErrorKind::kStructural, where + ": empty region");
  std::sort(pixels.begin(), pixels.end());
  if (std::adjacent_find(pixels.begin(), pixels.end()) != pixels.end()) {
    throw Error(ErrorKind::kStructural, where + ": repeated pixel");
  }
  const auto limit = static_cast<std::uint64_t>(width_) * static_cast<std::uint64_t>(height_);
  if (pixels.back() >= limit) throw Error(ErrorKind::kStructural, where + ": pixel outside the image");
  if (index_.count({frame, label})) throw Error(ErrorKind::kStructural, where + ": duplicate node");
  for (auto it = index_.lower_bound({frame, 0u}); it != index_.end() && it->first.first == frame; ++it) {
    const auto& [key, id] = *it;
    const auto& other = nodes_[id].pixels;
    auto a = pixels.begin();
    auto b = other.begin();
    while (a != pixels.end() && b != other.end()) {
      if (*a == *b) throw Error(ErrorKind::kStructural, where + ": region overlaps label " + std::to_string(key.second));
      if (*a < *b) ++a; else ++b;
    }
  }
  nodes_.push_back({label, frame, std::move(pixels)});
  index_[{frame, label}] = nodes_.size() - 1;
  return nodes_.size() - 1;
}

void LineageGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw Error(ErrorKind::kStructural, "edge endpoint out of range");
  const auto& a = nodes_[from];
  const auto& b = nodes_[to];
  const EdgeKind kind = a.label == b.label ? EdgeKind::kTrack : EdgeKind::kParent;
  if (b.frame <= a.frame) throw Error(ErrorKind::kStructural, "edges must point forward in time");
  if (kind == EdgeKind::kTrack && b.frame != a.frame + 1) {
    throw Error(ErrorKind::kStructural, "track edges must join consecutive frames");
  }
  edges_.push_back({from, to, kind});
}

std::size_t LineageGraph::find(std::uint32_t label, int frame) const {
  auto it = index_.find({frame, label});
  return it == index_.end() ? npos : it->second;
}

LineageGraph LineageGraph::without_node(std::size_t node) const {
  LineageGraph out(width_, height_, frame_count_);
  std::vector<std::size_t> remap(nodes_.size(), npos);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i == node) continue;
    remap[i] = out.add_node(nodes_[i].label, nodes_[i].frame, nodes_[i].pixels);
  }
  for (const auto& e : edges_) {
    if (e.from == node || e.to == node) continue;
    out.add_edge(remap[e.from], remap[e.to]);
  }
  return out;
}

LineageGraph build_graph(std::span<const LabelMask> masks, std::span<const TrackRecord> tracks) {
  if (masks.empty()) {
    if (!tracks.empty()) throw Error(ErrorKind::kStructural, "track records given for an empty video");
    return {};
  }
  const int w = masks[0].width(), h = masks[0].height();
  for (std::size_t t = 1; t < masks.size(); ++t) {
    if (masks[t].width() != w || masks[t].height() != h) {
      throw Error(ErrorKind::kDimensionMismatch, "mask frame " + std::to_string(t) + " differs in size from frame 0");
    }
  }
  const int frames = static_cast<int>(masks.size());

  std::vector<std::map<std::uint32_t, std::vector<std::uint32_t>>> regions(masks.size());
  for (std::size_t t = 0; t < masks.size(); ++t) {
    const auto v = masks[t].values();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i]) regions[t][v[i]].push_back(static_cast<std::uint32_t>(i));
  }

  std::map<std::uint32_t, const TrackRecord*> by_label;
  for (const auto& rec : tracks) {
    if (!by_label.emplace(rec.label, &rec).second) {
      throw Error(ErrorKind::kStructural, "duplicate track label " + std::to_string(rec.label));
    }
    if (rec.begin_frame < 0 || rec.end_frame < rec.begin_frame || rec.end_frame >= frames) {
      throw Error(ErrorKind::kStructural, "track " + std::to_string(rec.label) + " has an invalid frame interval");
    }
  }

  LineageGraph g(w, h, frames);
  for (const auto& [label, rec] : by_label) {
    std::size_t prev = LineageGraph::npos;
    for (int f = rec->begin_frame; f <= rec->end_frame; ++f) {
      auto it = regions[static_cast<std::size_t>(f)].find(label);
      if (it == regions[static_cast<std::size_t>(f)].end()) {
        throw Error(ErrorKind::kStructural,
                    "track " + std::to_string(label) + " has no region in frame " + std::to_string(f));
      }
      const std::size_t node = g.add_node(label, f, std::move(it->second));
      regions[static_cast<std::size_t>(f)].erase(it);
      if (prev != LineageGraph::npos) g.add_edge(prev, node);
      prev = node;
    }
  }
  for (std::size_t t = 0; t < regions.size(); ++t) {
    if (!regions[t].empty()) {
      throw Error(ErrorKind::kStructural, "label " + std::to_string(regions[t].begin()->first) + " in frame " +
                                              std::to_string(t) + " is not declared in the track records");
    }
  }
  for (const auto& [label, rec] : by_label) {
    if (rec->parent == 0) continue;
    auto it = by_label.find(rec->parent);
    if (it == by_label.end()) {
      throw Error(ErrorKind::kStructural,
                  "track " + std::to_string(label) + " names unknown parent " + std::to_string(rec->parent));
    }
    g.add_edge(g.find(rec->parent, it->second->end_frame), g.find(label, rec->begin_frame));
  }
  return g;
}

AogmResult aogm(const LineageGraph& gt, const LineageGraph& res, const AogmWeights& w) {
  for (double x : {w.ns, w.fn, w.fp, w.ed, w.ea, w.ec}) {
    if (!(x >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "AOGM weights must be non-negative");
  }
  if (gt.frame_count() != res.frame_count()) {
    throw Error(ErrorKind::kDimensionMismatch, "AOGM: ground truth spans " + std::to_string(gt.frame_count()) +
                                                   " frames, result spans " + std::to_string(res.frame_count()));
  }
  const bool gt_has = !gt.nodes().empty(), res_has = !res.nodes().empty();
  if (gt_has && res_has && (gt.width() != res.width() || gt.height() != res.height())) {
    throw Error(ErrorKind::kDimensionMismatch, "AOGM: graphs built on different image sizes");
  }

  // Detection test per frame: result node R matches GT node G when |R n G| > |G| / 2.
  std::vector<std::size_t> gt_match(gt.nodes().size(), LineageGraph::npos);
  std::vector<std::vector<std::size_t>> res_matches(res.nodes().size());
  if (gt_has && res_has) {
    std::vector<std::vector<std::size_t>> gt_by_frame(static_cast<std::size_t>(gt.frame_count()));
    std::vector<std::vector<std::size_t>> res_by_frame(static_cast<std::size_t>(res.frame_count()));
    for (std::size_t i = 0; i < gt.nodes().size(); ++i) gt_by_frame[static_cast<std::size_t>(gt.nodes()[i].frame)].push_back(i);
    for (std::size_t i = 0; i < res.nodes().size(); ++i) res_by_frame[static_cast<std::size_t>(res.nodes()[i].frame)].push_back(i);
    std::vector<std::size_t> owner(static_cast<std::size_t>(gt.width()) * static_cast<std::size_t>(gt.height()),
                                   LineageGraph::npos);
    for (std::size_t f = 0; f < gt_by_frame.size(); ++f) {
      for (std::size_t r : res_by_frame[f])
        for (auto px : res.nodes()[r].pixels) owner[px] = r;
      for (std::size_t g : gt_by_frame[f]) {
        std::map<std::size_t, std::size_t> overlap;
        for (auto px : gt.nodes()[g].pixels)
          if (owner[px] != LineageGraph::npos) ++overlap[owner[px]];
        const std::size_t area = gt.nodes()[g].pixels.size();
        for (const auto& [r, ov] : overlap) {
          if (2 * ov > area) {
            gt_match[g] = r;
            res_matches[r].push_back(g);
          }
        }
      }
      for (std::size_t r : res_by_frame[f])
        for (auto px : res.nodes()[r].pixels) owner[px] = LineageGraph::npos;
    }
  }

  AogmResult out;
  auto& c = out.counts;
  for (auto m : gt_match) c.fn += m == LineageGraph::npos;
  for (const auto& m : res_matches) {
    if (m.empty()) ++c.fp;
    else c.ns += m.size() - 1;
  }

  std::map<std::pair<std::size_t, std::size_t>, std::pair<EdgeKind, bool>> gt_edges;  // -> (kind, covered)
  for (const auto& e : gt.edges()) gt_edges[{e.from, e.to}] = {e.kind, false};
  for (const auto& e : res.edges()) {
    bool found = false;
    for (std::size_t a : res_matches[e.from]) {
      for (std::size_t b : res_matches[e.to]) {
        auto it = gt_edges.find({a, b});
        if (it == gt_edges.end() || it->second.second) continue;
        it->second.second = true;
        if (it->second.first != e.kind) ++c.ec;
        found = true;
        break;
      }
      if (found) break;
    }
    if (!found) ++c.ed;
  }
  for (const auto& [key, state] : gt_edges) c.ea += !state.second;

  out.aogm_d = w.ns * static_cast<double>(c.ns) + w.fn * static_cast<double>(c.fn) + w.fp * static_cast<double>(c.fp) +
               w.ed * static_cast<double>(c.ed) + w.ea * static_cast<double>(c.ea) + w.ec * static_cast<double>(c.ec);
  out.aogm_0 = w.fn * static_cast<double>(gt.nodes().size()) + w.ea * static_cast<double>(gt.edges().size());
  return out;
}

double tra(const AogmResult& result) {
  if (!(result.aogm_0 > 0.0)) throw Error(ErrorKind::kUndefinedMetric, "TRA undefined: AOGM_0 is zero (empty ground truth)");
  return 1.0 - std::min(result.aogm_d, result.aogm_0) / result.aogm_0;
}

double tra(const LineageGraph& gt, const LineageGraph& res, const AogmWeights& weights) {
  return tra(aogm(gt, res, weights));
}

// ---------------------------------------------------------------------------

double cross_entropy(std::span<const double> target, std::span<const double> predicted) {
  if (target.size() != predicted.size() || target.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cross entropy: vectors must be nonempty and of equal length");
  }
  double total = 0.0;
  for (double y : predicted) {
    if (!(y >= 0.0 && y <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "cross entropy: probabilities must lie in [0,1]");
    total += y;
  }
  if (std::abs(total - 1.0) > 1e-6) throw Error(ErrorKind::kInvalidArgument, "cross entropy: probabilities must sum to 1");
  double loss = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == 0.0) continue;
    if (predicted[i] == 0.0) return std::numeric_limits<double>::infinity();
    loss -= target[i] * std::log(predicted[i]);
  }
  return loss;
}

AdamMoments adam_moments(double m_prev, double v_prev, double gradient, double beta1, double beta2) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "ADAM decay rates must lie in [0,1)");
  }
  return {beta1 * m_prev + (1.0 - beta1) * gradient, beta2 * v_prev + (1.0 - beta2) * gradient * gradient};
}

}  // namespace migtk
