#include "run.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <map>

#include "commands.hpp"
#include "migtk/dataio.hpp"
#include "migtk/error.hpp"
#include "migtk/parallel.hpp"
#include "migtk/sampler.hpp"

namespace migtk::cli {

namespace fs = std::filesystem;

namespace {

// Manifest values stay on one line.
std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

KeyValues input_checksums(const RunConfig& config) {
  KeyValues out;
  for (auto key : command(config.subcommand).keys) {
    if (key != "input" && key != "masks" && key != "gt" && key != "res") continue;
    const fs::path root = get_value(config, key);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), root));
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      out.emplace_back("sha256." + std::string(key) + "/" + f.generic_string(), file_sha256(root / f));
    }
  }
  return out;
}

}  // namespace

std::string_view version() { return MIGTK_VERSION; }

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string prefix = "migtk " + config.subcommand + ": ";
  try {
    validate(config);
  } catch (const std::exception& e) {
    err << prefix << e.what() << '\n';
    return kExitUsage;
  }
  set_default_workers(config.workers);

  KeyValues manifest{{"tool", "migtk"}, {"version", std::string(version())}, {"command", config.subcommand}};
  for (auto& [k, v] : resolved_entries(config)) manifest.emplace_back("config." + k, v);
  if (config.subcommand == "sample-patches") manifest.emplace_back("rng", std::string(Rng::kAlgorithm));

  Stages stages;
  Context ctx{config, out, stages, {}};
  KeyValues checksums;
  std::string failure;
  try {
    stages.run("checksum", [&] { checksums = input_checksums(config); });
    command_body(config.subcommand)(ctx);
  } catch (const std::exception& e) {
    failure = one_line(e.what());
  }

  manifest.insert(manifest.end(), ctx.facts.begin(), ctx.facts.end());
  manifest.insert(manifest.end(), checksums.begin(), checksums.end());
  manifest.emplace_back("status", failure.empty() ? "ok" : "failed");
  if (!failure.empty()) {
    manifest.emplace_back("failed_stage", stages.current());
    manifest.emplace_back("error", failure);
    err << prefix << "stage " << stages.current() << ": " << failure << '\n';
  }

  KeyValues timings{{"workers", std::to_string(default_workers())}};
  for (const auto& [stage, ms] : stages.timings()) timings.emplace_back(stage + "_ms", format_number(ms, 3));
  try {
    fs::create_directories(config.output);
    write_text(config.output / "manifest.txt", format_key_values(manifest));
    write_text(config.output / "timings.txt", format_key_values(timings));
  } catch (const std::exception& e) {
    err << prefix << "cannot write the run manifest: " << e.what() << '\n';
    return kExitFailure;
  }
  return failure.empty() ? kExitOk : kExitFailure;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cell migration image analysis: drift registration, patch sampling, protrusions, SEG/TRA.",
               "migtk"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> given;
  std::map<std::string, std::string> help;
  for (const auto& p : parameters()) help[std::string(p.key)] = std::string(p.help);

  for (const auto& info : commands()) {
    auto* sub = app.add_subcommand(std::string(info.name), std::string(info.help));
    sub->add_option("--config", config_file, "key=value file; flags take precedence");
    auto& opts = given[std::string(info.name)];
    std::vector<std::string_view> keys = info.keys;
    keys.push_back("workers");
    for (auto key : keys) {
      const std::string k(key);
      auto* opt = sub->add_option(flag_name(key), values[k], help[k]);
      if (std::find(info.required.begin(), info.required.end(), key) != info.required.end()) {
        opt->description(help[k] + " (required)");
      }
      opts.emplace_back(k, opt);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  RunConfig config;
  config.subcommand = sub->get_name();
  try {
    if (!config_file.empty()) {
      if (!fs::is_regular_file(config_file)) {
        throw Error(ErrorKind::kIo, "config file does not exist: " + config_file);
      }
      apply_config_text(config, read_text(config_file), config_file);
    }
    for (const auto& [key, opt] : given[config.subcommand]) {
      if (opt->count() > 0) set_value(config, key, values[key]);
    }
  } catch (const std::exception& e) {
    err << "migtk " << config.subcommand << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return run(config, out, err);
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"migtk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace migtk::cli
