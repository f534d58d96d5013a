#pragma once

#include <cstdint>

namespace migtk {

// One line of a CTC track file: "L B E P".
struct TrackRecord {
  std::uint32_t label = 0;
  int begin_frame = 0;
  int end_frame = 0;
  std::uint32_t parent = 0;  // 0 = no parent

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

}  // namespace migtk
