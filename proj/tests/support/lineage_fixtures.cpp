#include "lineage_fixtures.hpp"

#include <algorithm>

namespace migtk::fixture {

VideoBuilder& VideoBuilder::box(int frame, std::uint32_t label, int top, int left, int bh, int bw) {
  auto& m = masks[static_cast<std::size_t>(frame)];
  for (int r = top; r < top + bh; ++r)
    for (int c = left; c < left + bw; ++c) m(r, c) = label;
  return *this;
}

VideoBuilder& VideoBuilder::track(std::uint32_t label, int begin, int end, std::uint32_t parent) {
  tracks.push_back({label, begin, end, parent});
  return *this;
}

LineageGraph VideoBuilder::graph() const { return build_graph(masks, tracks); }

namespace {

AogmCounts counts(std::size_t ns, std::size_t fn, std::size_t fp, std::size_t ed, std::size_t ea, std::size_t ec) {
  AogmCounts c;
  c.ns = ns;
  c.fn = fn;
  c.fp = fp;
  c.ed = ed;
  c.ea = ea;
  c.ec = ec;
  return c;
}

// One 2x2 object per frame, track 1 over frames 0..n-1, at (1,1).
VideoBuilder single_track(int frames) {
  VideoBuilder v(frames);
  for (int f = 0; f < frames; ++f) v.box(f, 1, 1, 1);
  v.track(1, 0, frames - 1);
  return v;
}

// Track 1 at A = (1,1) and track 2 at B = (6,6), both over frames 0..1.
VideoBuilder two_tracks() {
  VideoBuilder v(2);
  for (int f = 0; f < 2; ++f) v.box(f, 1, 1, 1).box(f, 2, 6, 6);
  v.track(1, 0, 1).track(2, 0, 1);
  return v;
}

// Track 1 frames 0..1 at (1,1); children 2 at (1,1) and 3 at (6,6) in frame 2.
VideoBuilder mitosis(bool with_parent) {
  VideoBuilder v(3);
  v.box(0, 1, 1, 1).box(1, 1, 1, 1).box(2, 2, 1, 1).box(2, 3, 6, 6);
  const std::uint32_t p = with_parent ? 1 : 0;
  v.track(1, 0, 1).track(2, 2, 2, p).track(3, 2, 2, p);
  return v;
}

}  // namespace

std::vector<LineageCase> lineage_cases() {
  std::vector<LineageCase> out;
  auto add = [&](std::string name, VideoBuilder gt, VideoBuilder res, AogmCounts c, double d, double a0,
                 AogmWeights w = {}) {
    out.push_back({std::move(name), std::move(gt), std::move(res), w, c, d, a0, 1.0 - std::min(d, a0) / a0});
  };

  add("identity", single_track(3), single_track(3), counts(0, 0, 0, 0, 0, 0), 0.0, 3 * 10 + 2 * 1.5);

  add("empty result", single_track(3), VideoBuilder(3), counts(0, 3, 0, 0, 2, 0), 3 * 10 + 2 * 1.5,
      3 * 10 + 2 * 1.5);

  {
    VideoBuilder res(3);
    res.box(0, 1, 1, 1).box(1, 1, 1, 1).track(1, 0, 1);
    add("last node and its edge missing", single_track(3), res, counts(0, 1, 0, 0, 1, 0), 10 + 1.5, 33);
  }

  {
    VideoBuilder res(2);
    res.box(0, 1, 1, 1).box(1, 2, 1, 1).track(1, 0, 0).track(2, 1, 1);
    add("link omitted", single_track(2), res, counts(0, 0, 0, 0, 1, 0), 1.5, 2 * 10 + 1.5);
  }
  {
    auto res = single_track(2);
    res.box(1, 2, 6, 6).track(2, 1, 1);
    add("one false positive node", single_track(2), res, counts(0, 0, 1, 0, 0, 0), 1, 21.5);
  }
  {
    auto res = single_track(2);
    res.box(0, 2, 6, 6).box(1, 2, 6, 6).track(2, 0, 1);
    add("false positive track", single_track(2), res, counts(0, 0, 2, 1, 0, 0), 2 + 1, 21.5);
  }
  {
    VideoBuilder gt(1);
    gt.box(0, 1, 1, 1).box(0, 2, 1, 3).track(1, 0, 0).track(2, 0, 0);
    VideoBuilder res(1);
    res.box(0, 1, 1, 1, 2, 4).track(1, 0, 0);
    add("merged detection", gt, res, counts(1, 0, 0, 0, 0, 0), 5, 20);
  }
  {
    VideoBuilder gt(1);
    gt.box(0, 1, 1, 1, 2, 4).track(1, 0, 0);
    VideoBuilder res(1);
    res.box(0, 1, 1, 1).box(0, 2, 1, 3).track(1, 0, 0).track(2, 0, 0);
    add("halves never match", gt, res, counts(0, 1, 2, 0, 0, 0), 10 + 2, 10);
  }
  {
    VideoBuilder gt(1);
    gt.box(0, 1, 1, 1, 2, 4).track(1, 0, 0);
    VideoBuilder res(1);
    res.box(0, 7, 1, 2, 2, 4).track(7, 0, 0);
    add("majority overlap matches", gt, res, counts(0, 0, 0, 0, 0, 0), 0, 10);
  }
  add("mitosis identity", mitosis(true), mitosis(true), counts(0, 0, 0, 0, 0, 0), 0, 4 * 10 + 3 * 1.5);
  add("mitosis without parents", mitosis(true), mitosis(false), counts(0, 0, 0, 0, 2, 0), 2 * 1.5, 44.5);
  {
    VideoBuilder res(2);
    res.box(0, 1, 1, 1).box(1, 2, 1, 1).track(1, 0, 0).track(2, 1, 1, 1);
    add("track edge reported as parent", single_track(2), res, counts(0, 0, 0, 0, 0, 1), 1, 21.5);
  }
  {
    VideoBuilder gt(2);
    gt.box(0, 1, 1, 1).box(1, 2, 1, 1).track(1, 0, 0).track(2, 1, 1, 1);
    add("parent edge reported as track", gt, single_track(2), counts(0, 0, 0, 0, 0, 1), 1, 21.5);
  }
  {
    VideoBuilder res(3);
    res.box(0, 1, 1, 1).box(2, 2, 1, 1).track(1, 0, 0).track(2, 2, 2, 1);
    add("gap bridged by parent edge", single_track(3), res, counts(0, 1, 0, 1, 2, 0), 10 + 1 + 2 * 1.5, 33);
  }
  {
    VideoBuilder gt(2);
    gt.box(0, 1, 1, 1).box(1, 2, 6, 6).track(1, 0, 0).track(2, 1, 1);
    VideoBuilder res(2);
    res.box(0, 1, 1, 1).box(1, 1, 6, 6).track(1, 0, 1);
    add("spurious link", gt, res, counts(0, 0, 0, 1, 0, 0), 1, 20);
  }
  {
    auto res = two_tracks();
    for (auto& m : res.masks)
      for (auto& v : m.values()) v = v == 1 ? 2 : (v == 2 ? 1 : 0);
    add("labels permuted", two_tracks(), res, counts(0, 0, 0, 0, 0, 0), 0, 4 * 10 + 2 * 1.5);
  }
  {
    VideoBuilder res(2);
    res.box(0, 1, 1, 1).box(1, 1, 6, 6).box(0, 2, 6, 6).box(1, 2, 1, 1).track(1, 0, 1).track(2, 0, 1);
    add("identities swapped", two_tracks(), res, counts(0, 0, 0, 2, 2, 0), 2 + 2 * 1.5, 43);
    AogmWeights unit{1, 1, 1, 1, 1, 1};
    add("identities swapped, unit weights", two_tracks(), res, counts(0, 0, 0, 2, 2, 0), 4, 4 + 2, unit);
  }
  {
    VideoBuilder res(2);
    res.box(0, 1, 1, 1).box(1, 1, 8, 8).track(1, 0, 1);
    add("object lost and replaced", single_track(2), res, counts(0, 1, 1, 1, 1, 0), 10 + 1 + 1 + 1.5, 21.5);
  }
  {
    VideoBuilder gt(2);
    for (int f = 0; f < 2; ++f) gt.box(f, 1, 1, 1).box(f, 2, 1, 3);
    gt.track(1, 0, 1).track(2, 0, 1);
    VideoBuilder res(2);
    for (int f = 0; f < 2; ++f) res.box(f, 1, 1, 1, 2, 4);
    res.track(1, 0, 1);
    add("merged pair over time", gt, res, counts(2, 0, 0, 0, 1, 0), 2 * 5 + 1.5, 4 * 10 + 2 * 1.5);
  }
  return out;
}

}  // namespace migtk::fixture
