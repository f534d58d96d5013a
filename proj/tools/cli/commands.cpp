#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "migtk/dataio.hpp"
#include "migtk/error.hpp"
#include "migtk/metrics.hpp"
#include "migtk/morphology.hpp"
#include "migtk/parallel.hpp"
#include "migtk/registration.hpp"
#include "migtk/sampler.hpp"
#include "migtk/tracking.hpp"

namespace migtk::cli {

namespace fs = std::filesystem;

void Stages::run(std::string name, const std::function<void()>& body) {
  current_ = std::move(name);
  const auto start = std::chrono::steady_clock::now();
  body();
  const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
  timings_.emplace_back(current_, elapsed.count());
}

namespace {

std::string str(std::size_t v) { return std::to_string(v); }
std::string str(int v) { return std::to_string(v); }
std::string num(double v) { return format_number(v); }

std::vector<GrayFrame> load_frames(const VideoDataset& ds) {
  std::vector<GrayFrame> frames(ds.frame_count());
  parallel_for(frames.size(), [&](std::size_t t) { frames[t] = ds.frame(t); });
  return frames;
}

void write_frames(std::span<const GrayFrame> frames, const fs::path& dir) {
  fs::create_directories(dir);
  parallel_for(frames.size(), [&](std::size_t t) { write_image(frames[t], dir / frame_file_name("t", t)); });
}

// [0, 1] intensities stored as 16-bit samples.
GrayFrame quantize(const Raster<double>& frame, double pixel_size) {
  Raster<std::uint16_t> px(frame.width(), frame.height());
  for (std::size_t i = 0; i < px.size(); ++i) {
    px.values()[i] = static_cast<std::uint16_t>(std::lround(frame.values()[i] * 65535.0));
  }
  return GrayFrame(std::move(px), 16, pixel_size);
}

std::vector<NormalizedFrame> normalize_all(std::span<const GrayFrame> frames, const RunConfig& c) {
  std::vector<NormalizedFrame> out(frames.size());
  parallel_for(frames.size(), [&](std::size_t t) { out[t] = normalize_percentile(frames[t], c.p_lo, c.p_hi); });
  return out;
}

void record_video(Context& ctx, const VideoDataset& ds) {
  ctx.facts.emplace_back("input.frames", str(ds.frame_count()));
  ctx.facts.emplace_back("input.width", str(ds.width));
  ctx.facts.emplace_back("input.height", str(ds.height));
  ctx.facts.emplace_back("input.bit_depth", str(ds.bit_depth));
}

void record_masks(Context& ctx, std::span<const LabelMask> masks) {
  ctx.facts.emplace_back("masks.frames", str(masks.size()));
  ctx.facts.emplace_back("masks.width", str(masks.empty() ? 0 : masks[0].width()));
  ctx.facts.emplace_back("masks.height", str(masks.empty() ? 0 : masks[0].height()));
}

std::vector<LabelMask> load_masks(const fs::path& dir) {
  auto masks = load_mask_series(dir, "mask");
  if (masks.empty()) throw Error(ErrorKind::kInvalidInput, "no mask000.tif series in " + dir.string());
  return masks;
}

void write_summary(Context& ctx, const KeyValues& summary, const fs::path& path) {
  const auto text = format_key_values(summary);
  write_text(path, text);
  ctx.out << text;
}

CsvTable drift_table(const RegisteredVideo& reg) {
  CsvTable t({"frame", "dy", "dx", "score"});
  for (std::size_t i = 0; i < reg.pairwise.size(); ++i) {
    const auto& d = reg.pairwise[i];
    t.add_row({str(i), str(d.dy), str(d.dx), num(d.score)});
  }
  return t;
}

void add_crop(KeyValues& kv, const RegisteredVideo& reg) {
  kv.emplace_back("crop_top", str(reg.crop.top));
  kv.emplace_back("crop_left", str(reg.crop.left));
  kv.emplace_back("crop_height", str(reg.crop.height));
  kv.emplace_back("crop_width", str(reg.crop.width));
}

struct ProtrusionTables {
  CsvTable tips{{"frame", "label", "centroid_row", "centroid_col", "tip_row", "tip_col", "length_um"}};
  CsvTable cells{{"frame", "label", "centroid_row", "centroid_col", "tips"}};
  std::size_t cell_count = 0;
  std::size_t tip_count = 0;
};

ProtrusionTables measure_protrusions(std::span<const LabelMask> masks, const RunConfig& c) {
  ProtrusionTables out;
  for (std::size_t t = 0; t < masks.size(); ++t) {
    for (const auto& cell : detect_protrusions(masks[t], c.pixel_size, c.min_protrusion_um)) {
      const auto row = str(cell.centroid.row), col = str(cell.centroid.col);
      out.cells.add_row({str(t), std::to_string(cell.label), row, col, str(cell.tips.size())});
      for (const auto& tip : cell.tips) {
        out.tips.add_row({str(t), std::to_string(cell.label), row, col, str(tip.tip.row), str(tip.tip.col),
                          num(tip.length_um)});
      }
      ++out.cell_count;
      out.tip_count += cell.tips.size();
    }
  }
  return out;
}

void add_protrusions(KeyValues& kv, const ProtrusionTables& p) {
  kv.emplace_back("cells", str(p.cell_count));
  kv.emplace_back("tips", str(p.tip_count));
}

struct SegOutcome {
  CsvTable table{{"frame", "gt_label", "res_label", "jaccard"}};
  SegVideoScore score;
};

SegOutcome evaluate_seg(const std::map<int, LabelMask>& gt, std::span<const LabelMask> res, SegMatchRule rule) {
  SegOutcome out;
  for (const auto& [frame, g] : gt) {
    if (static_cast<std::size_t>(frame) >= res.size()) {
      throw Error(ErrorKind::kInvalidInput, "result has no mask for ground-truth frame " + str(frame));
    }
    for (const auto& s : seg_frame(g, res[static_cast<std::size_t>(frame)], rule)) {
      out.table.add_row({str(frame), std::to_string(s.gt_label), std::to_string(s.res_label), num(s.score)});
      out.score.score_sum += s.score;
      ++out.score.objects;
    }
  }
  if (out.score.objects == 0) throw Error(ErrorKind::kUndefinedMetric, "SEG undefined: no ground-truth objects");
  out.score.seg = out.score.score_sum / static_cast<double>(out.score.objects);
  return out;
}

void add_seg(KeyValues& kv, const SegOutcome& s, SegMatchRule rule) {
  kv.emplace_back("seg", num(s.score.seg));
  kv.emplace_back("seg_objects", str(s.score.objects));
  kv.emplace_back("seg_rule", rule == SegMatchRule::kCtcStandard ? "standard" : "inverted");
}

void add_tra(KeyValues& kv, const LineageGraph& gt, const LineageGraph& res, const AogmWeights& w) {
  const auto r = aogm(gt, res, w);
  const double score = tra(r);
  kv.emplace_back("gt_nodes", str(gt.nodes().size()));
  kv.emplace_back("gt_edges", str(gt.edges().size()));
  kv.emplace_back("res_nodes", str(res.nodes().size()));
  kv.emplace_back("res_edges", str(res.edges().size()));
  kv.emplace_back("ns", str(r.counts.ns));
  kv.emplace_back("fn", str(r.counts.fn));
  kv.emplace_back("fp", str(r.counts.fp));
  kv.emplace_back("ed", str(r.counts.ed));
  kv.emplace_back("ea", str(r.counts.ea));
  kv.emplace_back("ec", str(r.counts.ec));
  kv.emplace_back("aogm_d", num(r.aogm_d));
  kv.emplace_back("aogm_0", num(r.aogm_0));
  kv.emplace_back("tra", num(score));
}

fs::path subdir_if_present(const fs::path& root, const char* name) {
  return fs::is_directory(root / name) ? root / name : root;
}

// External masks may be drawn on the raw frames (registered like them) or on
// the registered frames (used as they are).
LabelMask align_mask(const LabelMask& m, std::size_t t, const RegisteredVideo& reg, int raw_w, int raw_h,
                     const std::string& what) {
  if (m.width() == raw_w && m.height() == raw_h) return apply_registration(m, reg.cumulative[t], reg.crop);
  if (m.width() == reg.crop.width && m.height() == reg.crop.height) return m;
  throw Error(ErrorKind::kDimensionMismatch,
              what + " frame " + str(t) + " is " + str(m.width()) + "x" + str(m.height()) + ", expected " +
                  str(raw_w) + "x" + str(raw_h) + " or the registered " + str(reg.crop.width) + "x" +
                  str(reg.crop.height));
}

// ---------------------------------------------------------------------------

void cmd_register(Context& ctx) {
  const auto& c = ctx.config;
  VideoDataset ds;
  std::vector<GrayFrame> frames;
  RegisteredVideo reg;
  ctx.stages.run("load", [&] {
    ds = load_ctc_video(c.input, c.pixel_size);
    frames = load_frames(ds);
  });
  record_video(ctx, ds);
  ctx.stages.run("register", [&] { reg = register_video(frames, c.max_shift); });
  ctx.stages.run("write", [&] {
    write_frames(reg.frames, c.output);
    write_text(c.output / "drift.csv", drift_table(reg).str());
    KeyValues s{{"frames", str(reg.frames.size())}};
    add_crop(s, reg);
    write_summary(ctx, s, c.output / "summary.txt");
  });
}

void cmd_normalize(Context& ctx) {
  const auto& c = ctx.config;
  VideoDataset ds;
  std::vector<GrayFrame> frames;
  std::vector<NormalizedFrame> normalized;
  ctx.stages.run("load", [&] {
    ds = load_ctc_video(c.input, c.pixel_size);
    frames = load_frames(ds);
  });
  record_video(ctx, ds);
  ctx.stages.run("normalize", [&] { normalized = normalize_all(frames, c); });
  ctx.stages.run("write", [&] {
    std::vector<GrayFrame> out;
    for (const auto& f : normalized) out.push_back(quantize(f, c.pixel_size));
    write_frames(out, c.output);
    write_summary(ctx, {{"frames", str(out.size())}}, c.output / "summary.txt");
  });
}

void cmd_sample_patches(Context& ctx) {
  const auto& c = ctx.config;
  VideoDataset ds;
  std::vector<NormalizedFrame> frames;
  std::vector<LabelMask> masks;
  ctx.stages.run("load", [&] {
    ds = load_ctc_video(c.input, c.pixel_size);
    masks = load_masks(c.masks);
  });
  record_video(ctx, ds);
  record_masks(ctx, masks);
  if (masks.size() != ds.frame_count() || masks[0].width() != ds.width || masks[0].height() != ds.height) {
    throw Error(ErrorKind::kDimensionMismatch, "mask series in " + c.masks.string() + " does not match the video");
  }
  if (static_cast<std::size_t>(c.frame_window) > ds.frame_count()) {
    throw Error(ErrorKind::kInvalidArgument,
                "frame_window " + str(c.frame_window) + " exceeds the " + str(ds.frame_count()) + " frames");
  }
  if (c.patch_size > std::min(ds.width, ds.height)) {
    throw Error(ErrorKind::kInvalidArgument, "patch_size " + str(c.patch_size) + " exceeds the frame size");
  }
  ctx.stages.run("normalize", [&] { frames = normalize_all(load_frames(ds), c); });

  struct Drawn {
    SampledPatch sample;
    std::size_t last_frame = 0;
  };
  std::vector<Drawn> drawn;
  ctx.stages.run("sample", [&] {
    Rng rng(*c.seed);
    const auto k = static_cast<std::size_t>(c.frame_window);
    for (int i = 0; i < c.num_patches; ++i) {
      const std::size_t t = k - 1 + static_cast<std::size_t>(rng.below(frames.size() - k + 1));
      const std::span<const NormalizedFrame> window(frames.data() + (t + 1 - k), k);
      drawn.push_back({sample_patch(window, masks[t], c.patch_size, c.patch_size, c.fg_weight, c.bg_weight, rng), t});
    }
  });
  ctx.stages.run("write", [&] {
    const fs::path dir = c.output / "patches";
    fs::create_directories(dir);
    CsvTable manifest({"seed", "draw_index", "center_row", "center_col", "top", "left", "height", "width",
                       "frame_begin", "frame_end", "augmentation"});
    for (std::size_t i = 0; i < drawn.size(); ++i) {
      const auto& d = drawn[i];
      const auto& p = d.sample.patch;
      char stem[32];
      std::snprintf(stem, sizeof stem, "p%04zu", i);
      for (std::size_t j = 0; j < p.frames.size(); ++j) {
        write_image(quantize(p.frames[j], c.pixel_size), dir / (std::string(stem) + "_t" + str(j) + ".tif"));
      }
      write_label_mask(p.mask, dir / (std::string(stem) + "_mask.tif"));
      const std::size_t first = d.last_frame + 1 - p.frames.size();
      manifest.add_row({std::to_string(*c.seed), std::to_string(d.sample.draw_index), str(d.sample.center.row),
                        str(d.sample.center.col), str(p.rect.top), str(p.rect.left), str(p.rect.height),
                        str(p.rect.width), str(first), str(d.last_frame), std::string(to_string(d.sample.op))});
    }
    write_text(c.output / "patches.csv", manifest.str());
    write_summary(ctx, {{"patches", str(drawn.size())}, {"rng", std::string(Rng::kAlgorithm)}},
                  c.output / "summary.txt");
  });
}

void cmd_detect_protrusions(Context& ctx) {
  const auto& c = ctx.config;
  std::vector<LabelMask> masks;
  ProtrusionTables tables;
  ctx.stages.run("load", [&] { masks = load_masks(c.masks); });
  record_masks(ctx, masks);
  ctx.stages.run("protrusions", [&] { tables = measure_protrusions(masks, c); });
  ctx.stages.run("write", [&] {
    fs::create_directories(c.output);
    write_text(c.output / "protrusions.csv", tables.tips.str());
    write_text(c.output / "cells.csv", tables.cells.str());
    KeyValues s{{"frames", str(masks.size())}};
    add_protrusions(s, tables);
    write_summary(ctx, s, c.output / "summary.txt");
  });
}

void cmd_evaluate_seg(Context& ctx) {
  const auto& c = ctx.config;
  std::map<int, LabelMask> gt;
  std::vector<LabelMask> res;
  SegOutcome outcome;
  ctx.stages.run("load", [&] {
    const fs::path dir = subdir_if_present(c.gt, "SEG");
    for (const auto& [t, path] : list_indexed_files(dir, "man_seg")) gt.emplace(t, read_label_mask(path));
    if (gt.empty()) throw Error(ErrorKind::kInvalidInput, "no man_seg files in " + dir.string());
    res = load_masks(c.res);
  });
  record_masks(ctx, res);
  ctx.stages.run("evaluate", [&] { outcome = evaluate_seg(gt, res, c.seg_rule); });
  ctx.stages.run("write", [&] {
    fs::create_directories(c.output);
    write_text(c.output / "seg.csv", outcome.table.str());
    KeyValues s{{"gt_frames", str(gt.size())}};
    add_seg(s, outcome, c.seg_rule);
    write_summary(ctx, s, c.output / "summary.txt");
  });
}

void cmd_evaluate_tra(Context& ctx) {
  const auto& c = ctx.config;
  LineageGraph gt, res;
  ctx.stages.run("load", [&] {
    const fs::path dir = subdir_if_present(c.gt, "TRA");
    const auto gt_masks = load_mask_series(dir, "man_track");
    gt = build_graph(gt_masks, read_track_file(dir / "man_track.txt"));
    const auto result = load_ctc_result(c.res);
    if (!result.tracks) throw Error(ErrorKind::kInvalidInput, "missing " + (c.res / "res_track.txt").string());
    record_masks(ctx, result.masks);
    res = build_graph(result.masks, *result.tracks);
  });
  KeyValues s;
  ctx.stages.run("evaluate", [&] { add_tra(s, gt, res, c.aogm); });
  ctx.stages.run("write", [&] {
    fs::create_directories(c.output);
    write_summary(ctx, s, c.output / "summary.txt");
  });
}

void cmd_link(Context& ctx) {
  const auto& c = ctx.config;
  std::vector<LabelMask> masks;
  LinkedVideo linked;
  ctx.stages.run("load", [&] { masks = load_masks(c.masks); });
  record_masks(ctx, masks);
  ctx.stages.run("link", [&] { linked = link_by_overlap(masks, c.min_iou); });
  ctx.stages.run("write", [&] {
    write_ctc_result(c.output, linked.masks, linked.tracks);
    write_summary(ctx, {{"frames", str(masks.size())}, {"tracks", str(linked.tracks.size())}},
                  c.output / "summary.txt");
  });
}

void cmd_pipeline(Context& ctx) {
  const auto& c = ctx.config;
  VideoDataset ds;
  std::vector<GrayFrame> frames;
  std::vector<LabelMask> raw_masks, masks;
  RegisteredVideo reg;
  std::vector<NormalizedFrame> normalized;
  ProtrusionTables tables;
  LinkedVideo linked;
  KeyValues summary;

  ctx.stages.run("load", [&] {
    ds = load_ctc_video(c.input, c.pixel_size);
    frames = load_frames(ds);
    raw_masks = load_masks(c.masks);
  });
  record_video(ctx, ds);
  record_masks(ctx, raw_masks);
  if (raw_masks.size() != frames.size()) {
    throw Error(ErrorKind::kDimensionMismatch, str(raw_masks.size()) + " masks for " + str(frames.size()) + " frames");
  }
  ctx.stages.run("register", [&] { reg = register_video(frames, c.max_shift); });
  ctx.stages.run("normalize", [&] { normalized = normalize_all(reg.frames, c); });
  ctx.stages.run("masks", [&] {
    for (std::size_t t = 0; t < raw_masks.size(); ++t) {
      masks.push_back(align_mask(raw_masks[t], t, reg, ds.width, ds.height, "mask"));
    }
  });
  ctx.stages.run("protrusions", [&] { tables = measure_protrusions(masks, c); });
  ctx.stages.run("link", [&] { linked = link_by_overlap(masks, c.min_iou); });

  summary.emplace_back("frames", str(frames.size()));
  add_crop(summary, reg);
  add_protrusions(summary, tables);
  summary.emplace_back("tracks", str(linked.tracks.size()));

  std::optional<SegOutcome> seg;
  ctx.stages.run("evaluate", [&] {
    if (!ds.seg_masks.empty()) {
      std::map<int, LabelMask> gt;
      for (const auto& [t, path] : ds.seg_masks) {
        if (static_cast<std::size_t>(t) >= frames.size()) {
          throw Error(ErrorKind::kInvalidInput, "ground truth " + path.string() + " has no matching frame");
        }
        gt.emplace(t, align_mask(read_label_mask(path), static_cast<std::size_t>(t), reg, ds.width, ds.height,
                                 "SEG ground truth"));
      }
      seg = evaluate_seg(gt, linked.masks, c.seg_rule);
      add_seg(summary, *seg, c.seg_rule);
    }
    if (ds.tracks && !ds.tra_masks.empty()) {
      const auto raw = load_mask_series(ds.root / "TRA", "man_track");
      std::vector<LabelMask> gt_masks;
      for (std::size_t t = 0; t < raw.size(); ++t) {
        gt_masks.push_back(align_mask(raw[t], t, reg, ds.width, ds.height, "TRA ground truth"));
      }
      add_tra(summary, build_graph(gt_masks, *ds.tracks), build_graph(linked.masks, linked.tracks), c.aogm);
    }
  });

  ctx.stages.run("write", [&] {
    write_frames(reg.frames, c.output / "registered");
    std::vector<GrayFrame> quantized;
    for (const auto& f : normalized) quantized.push_back(quantize(f, c.pixel_size));
    write_frames(quantized, c.output / "normalized");
    write_text(c.output / "drift.csv", drift_table(reg).str());
    write_text(c.output / "protrusions.csv", tables.tips.str());
    write_text(c.output / "cells.csv", tables.cells.str());
    write_ctc_result(c.output / "result", linked.masks, linked.tracks);
    if (seg) write_text(c.output / "seg.csv", seg->table.str());
    write_summary(ctx, summary, c.output / "summary.txt");
  });
}

}  // namespace

CommandBody command_body(std::string_view name) {
  static const std::map<std::string_view, CommandBody> table = {
      {"register", cmd_register},
      {"normalize", cmd_normalize},
      {"sample-patches", cmd_sample_patches},
      {"detect-protrusions", cmd_detect_protrusions},
      {"evaluate-seg", cmd_evaluate_seg},
      {"evaluate-tra", cmd_evaluate_tra},
      {"link", cmd_link},
      {"pipeline", cmd_pipeline},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorKind::kInvalidArgument, "unknown subcommand '" + std::string(name) + "'");
  return it->second;
}

}  // namespace migtk::cli
