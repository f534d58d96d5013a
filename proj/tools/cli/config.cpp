#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

#include "migtk/error.hpp"

namespace migtk::cli {

namespace fs = std::filesystem;

namespace {

Error bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  return Error(ErrorKind::kInvalidArgument,
               "invalid value '" + std::string(value) + "' for " + std::string(key) + ": expected " +
                   std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text, std::string_view expected) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) throw bad_value(key, text, expected);
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  const double v = parse_number<double>(key, text, "a real number");
  if (!std::isfinite(v)) throw bad_value(key, text, "a finite real number");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void require(bool ok, std::string_view key, const std::string& rule, const std::string& value) {
  if (!ok) {
    throw Error(ErrorKind::kInvalidArgument, std::string(key) + " = " + value + " violates " + rule);
  }
}

bool is_path_key(std::string_view key) {
  return key == "input" || key == "output" || key == "masks" || key == "gt" || key == "res";
}

}  // namespace

const std::vector<ParameterInfo>& parameters() {
  static const std::vector<ParameterInfo> table = {
      {"input", "video directory (t000.tif, t001.tif, ...)"},
      {"masks", "label mask series (mask000.tif, ...)"},
      {"gt", "ground-truth directory"},
      {"res", "result directory (mask000.tif, ..., res_track.txt)"},
      {"output", "output directory"},
      {"pixel_size", "micrometres per pixel"},
      {"max_shift", "largest drift searched per frame pair, pixels"},
      {"p_lo", "lower normalization percentile"},
      {"p_hi", "upper normalization percentile"},
      {"min_protrusion_um", "shortest protrusion kept, micrometres"},
      {"fg_weight", "sampling weight of foreground pixels"},
      {"bg_weight", "sampling weight of background pixels"},
      {"patch_size", "patch side, pixels"},
      {"frame_window", "consecutive frames per patch"},
      {"num_patches", "number of patches to draw"},
      {"seed", "random seed"},
      {"min_iou", "smallest overlap accepted as a link"},
      {"seg_rule", "standard | inverted"},
      {"aogm_ns", "AOGM weight: node split"},
      {"aogm_fn", "AOGM weight: false negative node"},
      {"aogm_fp", "AOGM weight: false positive node"},
      {"aogm_ed", "AOGM weight: edge deletion"},
      {"aogm_ea", "AOGM weight: edge addition"},
      {"aogm_ec", "AOGM weight: edge semantic change"},
      {"workers", "worker threads, 0 = all cores"},
  };
  return table;
}

const std::vector<CommandInfo>& commands() {
  static const std::vector<std::string_view> aogm = {"aogm_ns", "aogm_fn", "aogm_fp",
                                                     "aogm_ed", "aogm_ea", "aogm_ec"};
  auto with_aogm = [&](std::vector<std::string_view> keys) {
    keys.insert(keys.end(), aogm.begin(), aogm.end());
    return keys;
  };
  static const std::vector<CommandInfo> table = {
      {"register", "correct frame-to-frame drift and crop the borders",
       {"input", "output", "pixel_size", "max_shift"}, {"input", "output"}},
      {"normalize", "percentile-normalize every frame", {"input", "output", "p_lo", "p_hi"}, {"input", "output"}},
      {"sample-patches", "draw foreground-weighted training patches",
       {"input", "masks", "output", "p_lo", "p_hi", "fg_weight", "bg_weight", "patch_size", "frame_window",
        "num_patches", "seed"},
       {"input", "masks", "output", "seed"}},
      {"detect-protrusions", "find protrusion tips in a label mask series",
       {"masks", "output", "pixel_size", "min_protrusion_um"}, {"masks", "output"}},
      {"evaluate-seg", "SEG of a result against ground truth", {"gt", "res", "output", "seg_rule"},
       {"gt", "res", "output"}},
      {"evaluate-tra", "TRA of a result against ground truth", with_aogm({"gt", "res", "output"}),
       {"gt", "res", "output"}},
      {"link", "link a mask series into tracks by overlap", {"masks", "output", "min_iou"}, {"masks", "output"}},
      {"pipeline", "register, normalize, ingest masks, measure protrusions and score",
       with_aogm({"input", "masks", "output", "pixel_size", "max_shift", "p_lo", "p_hi", "min_protrusion_um",
                  "min_iou", "seg_rule"}),
       {"input", "masks", "output"}},
  };
  return table;
}

const CommandInfo& command(std::string_view name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw Error(ErrorKind::kInvalidArgument, "unknown subcommand '" + std::string(name) + "'");
}

std::string flag_name(std::string_view key) {
  std::string out = "--" + std::string(key);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

void set_value(RunConfig& c, std::string_view key, std::string_view v) {
  if (key == "input") c.input = fs::path(std::string(v));
  else if (key == "output") c.output = fs::path(std::string(v));
  else if (key == "masks") c.masks = fs::path(std::string(v));
  else if (key == "gt") c.gt = fs::path(std::string(v));
  else if (key == "res") c.res = fs::path(std::string(v));
  else if (key == "pixel_size") c.pixel_size = parse_real(key, v);
  else if (key == "max_shift") c.max_shift = parse_number<int>(key, v, "an integer");
  else if (key == "p_lo") c.p_lo = parse_real(key, v);
  else if (key == "p_hi") c.p_hi = parse_real(key, v);
  else if (key == "min_protrusion_um") c.min_protrusion_um = parse_real(key, v);
  else if (key == "fg_weight") c.fg_weight = parse_real(key, v);
  else if (key == "bg_weight") c.bg_weight = parse_real(key, v);
  else if (key == "patch_size") c.patch_size = parse_number<int>(key, v, "an integer");
  else if (key == "frame_window") c.frame_window = parse_number<int>(key, v, "an integer");
  else if (key == "num_patches") c.num_patches = parse_number<int>(key, v, "an integer");
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v, "an unsigned 64-bit integer");
  else if (key == "min_iou") c.min_iou = parse_real(key, v);
  else if (key == "seg_rule") {
    if (v == "standard") c.seg_rule = SegMatchRule::kCtcStandard;
    else if (v == "inverted") c.seg_rule = SegMatchRule::kInvertedCompat;
    else throw bad_value(key, v, "standard or inverted");
  }
  else if (key == "aogm_ns") c.aogm.ns = parse_real(key, v);
  else if (key == "aogm_fn") c.aogm.fn = parse_real(key, v);
  else if (key == "aogm_fp") c.aogm.fp = parse_real(key, v);
  else if (key == "aogm_ed") c.aogm.ed = parse_real(key, v);
  else if (key == "aogm_ea") c.aogm.ea = parse_real(key, v);
  else if (key == "aogm_ec") c.aogm.ec = parse_real(key, v);
  else if (key == "workers") c.workers = parse_number<unsigned>(key, v, "a non-negative integer");
  else throw Error(ErrorKind::kInvalidArgument, "unknown parameter '" + std::string(key) + "'");
}

std::string get_value(const RunConfig& c, std::string_view key) {
  if (key == "input") return c.input.string();
  if (key == "output") return c.output.string();
  if (key == "masks") return c.masks.string();
  if (key == "gt") return c.gt.string();
  if (key == "res") return c.res.string();
  if (key == "pixel_size") return format_real(c.pixel_size);
  if (key == "max_shift") return std::to_string(c.max_shift);
  if (key == "p_lo") return format_real(c.p_lo);
  if (key == "p_hi") return format_real(c.p_hi);
  if (key == "min_protrusion_um") return format_real(c.min_protrusion_um);
  if (key == "fg_weight") return format_real(c.fg_weight);
  if (key == "bg_weight") return format_real(c.bg_weight);
  if (key == "patch_size") return std::to_string(c.patch_size);
  if (key == "frame_window") return std::to_string(c.frame_window);
  if (key == "num_patches") return std::to_string(c.num_patches);
  if (key == "seed") return c.seed ? std::to_string(*c.seed) : std::string();
  if (key == "min_iou") return format_real(c.min_iou);
  if (key == "seg_rule") return c.seg_rule == SegMatchRule::kCtcStandard ? "standard" : "inverted";
  if (key == "aogm_ns") return format_real(c.aogm.ns);
  if (key == "aogm_fn") return format_real(c.aogm.fn);
  if (key == "aogm_fp") return format_real(c.aogm.fp);
  if (key == "aogm_ed") return format_real(c.aogm.ed);
  if (key == "aogm_ea") return format_real(c.aogm.ea);
  if (key == "aogm_ec") return format_real(c.aogm.ec);
  if (key == "workers") return std::to_string(c.workers);
  throw Error(ErrorKind::kInvalidArgument, "unknown parameter '" + std::string(key) + "'");
}

void apply_config_text(RunConfig& config, std::string_view text, const fs::path& origin) {
  KeyValues entries;
  try {
    entries = parse_key_values(text);
  } catch (const ParseError& e) {
    throw Error(ErrorKind::kParse, origin.string() + ": " + e.what());
  }
  for (const auto& [key, value] : entries) {
    try {
      set_value(config, key, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::kInvalidArgument, origin.string() + ": " + e.what());
    }
  }
}

void validate(const RunConfig& c) {
  const auto& info = command(c.subcommand);
  auto reads = [&](std::string_view key) {
    return std::find(info.keys.begin(), info.keys.end(), key) != info.keys.end();
  };
  for (auto key : info.required) {
    if (get_value(c, key).empty()) {
      throw Error(ErrorKind::kInvalidArgument, std::string(c.subcommand) + " requires " + flag_name(key));
    }
  }
  auto check = [&](std::string_view key, bool ok, const std::string& rule) {
    if (reads(key)) require(ok, key, rule, get_value(c, key));
  };
  check("pixel_size", c.pixel_size > 0.0, "pixel_size > 0");
  check("max_shift", c.max_shift >= 0, "max_shift >= 0");
  check("p_lo", c.p_lo >= 0.0 && c.p_lo <= c.p_hi, "0 <= p_lo <= p_hi");
  check("p_hi", c.p_hi <= 100.0 && c.p_lo <= c.p_hi, "p_lo <= p_hi <= 100");
  check("min_protrusion_um", c.min_protrusion_um >= 0.0, "min_protrusion_um >= 0");
  check("fg_weight", c.fg_weight >= 0.0, "fg_weight >= 0");
  check("bg_weight", c.bg_weight >= 0.0, "bg_weight >= 0");
  check("bg_weight", c.fg_weight + c.bg_weight > 0.0, "fg_weight + bg_weight > 0");
  check("patch_size", c.patch_size >= 1, "patch_size >= 1");
  check("frame_window", c.frame_window >= 1, "frame_window >= 1");
  check("num_patches", c.num_patches >= 1, "num_patches >= 1");
  check("min_iou", c.min_iou >= 0.0 && c.min_iou <= 1.0, "0 <= min_iou <= 1");
  const auto& w = c.aogm;
  check("aogm_ns", w.ns >= 0.0, "aogm_ns >= 0");
  check("aogm_fn", w.fn > 0.0, "aogm_fn > 0");
  check("aogm_fp", w.fp >= 0.0, "aogm_fp >= 0");
  check("aogm_ed", w.ed >= 0.0, "aogm_ed >= 0");
  check("aogm_ea", w.ea >= 0.0, "aogm_ea >= 0");
  check("aogm_ec", w.ec >= 0.0, "aogm_ec >= 0");

  // Inputs last: a bad number is reported even when a path is also wrong.
  for (auto key : info.keys) {
    if (!is_path_key(key) || key == "output") continue;
    const fs::path p = get_value(c, key);
    if (p.empty()) continue;
    std::error_code ec;
    if (!fs::is_directory(p, ec)) {
      throw Error(ErrorKind::kIo, "input directory does not exist: " + p.string());
    }
    if (fs::exists(c.output, ec) && fs::equivalent(p, c.output, ec)) {
      throw Error(ErrorKind::kInvalidArgument, "output directory must differ from input " + p.string());
    }
  }
}

KeyValues resolved_entries(const RunConfig& c) {
  const auto& info = command(c.subcommand);
  KeyValues out;
  for (const auto& p : parameters()) {
    if (p.key == "output" || p.key == "workers") continue;
    if (std::find(info.keys.begin(), info.keys.end(), p.key) == info.keys.end()) continue;
    const std::string v = get_value(c, p.key);
    if (is_path_key(p.key) && v.empty()) continue;
    out.emplace_back(std::string(p.key), v);
  }
  return out;
}

}  // namespace migtk::cli
