#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace migtk::cli {

// Named, timed steps of one run. After an exception, current() names the
// step that raised it.
class Stages {
 public:
  void run(std::string name, const std::function<void()>& body);

  const std::string& current() const noexcept { return current_; }
  const std::vector<std::pair<std::string, double>>& timings() const noexcept { return timings_; }

 private:
  std::string current_;
  std::vector<std::pair<std::string, double>> timings_;
};

struct Context {
  const RunConfig& config;
  std::ostream& out;
  Stages& stages;
  KeyValues facts;  // extra manifest entries, e.g. input dimensions
};

using CommandBody = void (*)(Context&);

CommandBody command_body(std::string_view name);

}  // namespace migtk::cli
