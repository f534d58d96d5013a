#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "migtk/dataio.hpp"
#include "migtk/metrics.hpp"
#include "migtk/morphology.hpp"
#include "migtk/sampler.hpp"

namespace migtk::cli {

inline constexpr int kDefaultMaxShift = 20;
inline constexpr int kDefaultPatchCount = 16;
inline constexpr double kDefaultMinIou = 0.3;

struct RunConfig {
  std::string subcommand;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path masks;
  std::filesystem::path gt;
  std::filesystem::path res;
  double pixel_size = kDefaultPixelSizeUm;
  double min_protrusion_um = kDefaultMinProtrusionUm;
  double fg_weight = kDefaultForegroundWeight;
  double bg_weight = kDefaultBackgroundWeight;
  int patch_size = kDefaultPatchSize;
  int frame_window = kDefaultFrameWindow;
  int num_patches = kDefaultPatchCount;
  std::optional<std::uint64_t> seed;
  int max_shift = kDefaultMaxShift;
  double min_iou = kDefaultMinIou;
  double p_lo = 0.1;
  double p_hi = 99.1;
  AogmWeights aogm;
  SegMatchRule seg_rule = SegMatchRule::kCtcStandard;
  unsigned workers = 0;
};

struct ParameterInfo {
  std::string_view key;
  std::string_view help;
};

const std::vector<ParameterInfo>& parameters();

struct CommandInfo {
  std::string_view name;
  std::string_view help;
  std::vector<std::string_view> keys;      // parameters the command reads
  std::vector<std::string_view> required;  // must be set before the run
};

const std::vector<CommandInfo>& commands();
const CommandInfo& command(std::string_view name);

// "pixel_size" -> "--pixel-size".
std::string flag_name(std::string_view key);

// Throws Error(kInvalidArgument) naming the key on an unknown key or a
// malformed value. Range checks are left to validate().
void set_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_value(const RunConfig& config, std::string_view key);

// Applies a key=value file; errors name the file and line.
void apply_config_text(RunConfig& config, std::string_view text, const std::filesystem::path& origin);

// Checks every parameter the subcommand reads against its module's
// preconditions, then that every input path exists. Nothing is written.
void validate(const RunConfig& config);

// Resolved parameters of the subcommand, in table order. The output path and
// worker count are left out: neither changes any output byte.
KeyValues resolved_entries(const RunConfig& config);

}  // namespace migtk::cli
