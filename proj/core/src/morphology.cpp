#include "migtk/morphology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

#include "migtk/parallel.hpp"

namespace migtk {

namespace {

constexpr double kFar = 1e20;

// Squared distance transform of a sampled function along one line
// (lower envelope of parabolas).
void squared_edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                    std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  auto intersect = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * q - 2.0 * p);
  };
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

DistanceField euclidean_distance_transform(const BinaryMask& mask) {
  const int h = mask.height(), w = mask.width();
  DistanceField out{Raster<double>(w, h, 0.0), DistanceMetric::kEuclideanToBackground};
  if (mask.empty()) return out;
  // Pad by one background pixel on every side.
  const int ph = h + 2, pw = w + 2;
  Raster<double> grid(pw, ph, 0.0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) grid(r + 1, c + 1) = mask.foreground(r, c) ? kFar : 0.0;

  const int n = std::max(ph, pw);
  std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n) + 1);
  std::vector<int> v(static_cast<std::size_t>(n));

  f.resize(static_cast<std::size_t>(ph));
  d.resize(static_cast<std::size_t>(ph));
  for (int c = 0; c < pw; ++c) {
    for (int r = 0; r < ph; ++r) f[static_cast<std::size_t>(r)] = grid(r, c);
    squared_edt_1d(f, d, v, z);
    for (int r = 0; r < ph; ++r) grid(r, c) = d[static_cast<std::size_t>(r)];
  }
  f.resize(static_cast<std::size_t>(pw));
  d.resize(static_cast<std::size_t>(pw));
  for (int r = 0; r < ph; ++r) {
    for (int c = 0; c < pw; ++c) f[static_cast<std::size_t>(c)] = grid(r, c);
    squared_edt_1d(f, d, v, z);
    for (int c = 0; c < pw; ++c) grid(r, c) = d[static_cast<std::size_t>(c)];
  }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out.values(r, c) = mask.foreground(r, c) ? std::sqrt(grid(r + 1, c + 1)) : 0.0;
  return out;
}

Pixel body_centroid(const BinaryMask& mask) {
  if (mask.count() == 0) throw Error(ErrorKind::kInvalidInput, "body centroid of an empty mask");
  const auto edt = euclidean_distance_transform(mask);
  Pixel best{-1, -1};
  double best_value = -1.0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.foreground(r, c) && edt(r, c) > best_value) {
        best_value = edt(r, c);
        best = {r, c};
      }
    }
  }
  return best;
}

DistanceField geodesic_distance(const BinaryMask& mask, Pixel seed) {
  if (!mask.contains(seed) || !mask.foreground(seed.row, seed.col)) {
    throw Error(ErrorKind::kInvalidArgument, "geodesic seed must be a foreground pixel");
  }
  static constexpr int kDr[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int kDc[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  static const double kCost[8] = {1.0, 1.0, 1.0, 1.0, std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0)};

  DistanceField out{Raster<double>(mask.width(), mask.height(), kUnreachable), DistanceMetric::kGeodesicFromSeed};
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  auto& dist = out.values;
  dist[seed] = 0.0;
  queue.push({0.0, dist.index(seed.row, seed.col)});
  while (!queue.empty()) {
    const auto [d, index] = queue.top();
    queue.pop();
    if (d > dist.values()[index]) continue;
    const Pixel p = dist.pixel(index);
    for (int k = 0; k < 8; ++k) {
      const int nr = p.row + kDr[k], nc = p.col + kDc[k];
      if (!mask.contains(nr, nc) || !mask.foreground(nr, nc)) continue;
      const double nd = d + kCost[k];
      if (nd < dist(nr, nc)) {
        dist(nr, nc) = nd;
        queue.push({nd, dist.index(nr, nc)});
      }
    }
  }
  return out;
}

namespace {

// Neighbours in the P2..P9 order: N, NE, E, SE, S, SW, W, NW.
std::array<int, 8> ring(const BinaryMask& m, int r, int c) {
  static constexpr int kDr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  static constexpr int kDc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  std::array<int, 8> p{};
  for (int k = 0; k < 8; ++k) {
    const int nr = r + kDr[k], nc = c + kDc[k];
    p[static_cast<std::size_t>(k)] = m.contains(nr, nc) && m.foreground(nr, nc) ? 1 : 0;
  }
  return p;
}

// Yokoi 8-connectivity number; a pixel is simple iff it equals 1.
int connectivity_number(const std::array<int, 8>& p) {
  // x1..x8 = E, NE, N, NW, W, SW, S, SE
  const int x[9] = {p[2], p[1], p[0], p[7], p[6], p[5], p[4], p[3], p[2]};
  int n = 0;
  for (int k = 0; k < 8; k += 2) {
    const int a = 1 - x[k], b = 1 - x[k + 1], c = 1 - x[(k + 2) % 8];
    n += a - a * b * c;
  }
  return n;
}

bool zhang_suen_candidate(const std::array<int, 8>& p, bool first_pass) {
  int b = 0;
  for (int v : p) b += v;
  if (b < 2 || b > 6) return false;
  int a = 0;
  for (int k = 0; k < 8; ++k) a += (p[static_cast<std::size_t>(k)] == 0 && p[static_cast<std::size_t>((k + 1) % 8)] == 1);
  if (a != 1) return false;
  const int p2 = p[0], p4 = p[2], p6 = p[4], p8 = p[6];
  if (first_pass) return p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0;
  return p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0;
}

}  // namespace

BinaryMask thin(const BinaryMask& mask) {
  BinaryMask img(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) img.values()[i] = mask.values()[i] ? 1 : 0;
  std::vector<Pixel> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (bool first_pass : {true, false}) {
      marked.clear();
      for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
          if (img.foreground(r, c) && zhang_suen_candidate(ring(img, r, c), first_pass)) marked.push_back({r, c});
      for (const Pixel& p : marked) {
        if (connectivity_number(ring(img, p.row, p.col)) != 1) continue;
        img[p] = 0;
        changed = true;
      }
    }
  }
  return img;
}

int skeleton_neighbours(const BinaryMask& skeleton, int row, int col) {
  int n = 0;
  for (int v : ring(skeleton, row, col)) n += v;
  return n;
}

SkeletonGraph skeletonize(const BinaryMask& mask) {
  SkeletonGraph g;
  g.skeleton = thin(mask);
  for (int r = 0; r < g.skeleton.height(); ++r) {
    for (int c = 0; c < g.skeleton.width(); ++c) {
      if (!g.skeleton.foreground(r, c)) continue;
      const int n = skeleton_neighbours(g.skeleton, r, c);
      if (n <= 1) g.endpoints.push_back({r, c});
      if (n >= 3) g.branch_points.push_back({r, c});
    }
  }
  return g;
}

ProtrusionReport analyze_cell(const BinaryMask& cell, std::uint32_t label, double pixel_size_um,
                              double min_length_um) {
  ProtrusionReport report;
  report.label = label;
  report.pixel_size_um = pixel_size_um;
  report.centroid = body_centroid(cell);
  const auto skeleton = skeletonize(cell);
  const auto geodesic = geodesic_distance(cell, report.centroid);
  for (const Pixel& tip : skeleton.endpoints) {
    const double d = geodesic[tip];
    if (std::isinf(d)) continue;  // endpoint on a fragment detached from the body
    const double length = d * pixel_size_um;
    if (length >= min_length_um) report.tips.push_back({tip, length});
  }
  return report;
}

std::vector<ProtrusionReport> detect_protrusions(const LabelMask& mask, double pixel_size_um, double min_length_um) {
  if (!(pixel_size_um > 0.0)) throw Error(ErrorKind::kInvalidArgument, "pixel size must be positive");
  if (!(min_length_um >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "minimum length must be >= 0");

  struct Box {
    std::uint32_t label;
    int r0, c0, r1, c1;
  };
  const auto labels = mask.labels();
  std::vector<Box> boxes;
  boxes.reserve(labels.size());
  for (auto l : labels) boxes.push_back({l, mask.height(), mask.width(), -1, -1});
  auto box_of = [&](std::uint32_t l) -> Box& {
    return *std::lower_bound(boxes.begin(), boxes.end(), l, [](const Box& b, std::uint32_t x) { return b.label < x; });
  };
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      const auto l = mask(r, c);
      if (l == 0) continue;
      Box& b = box_of(l);
      b.r0 = std::min(b.r0, r);
      b.c0 = std::min(b.c0, c);
      b.r1 = std::max(b.r1, r);
      b.c1 = std::max(b.c1, c);
    }
  }

  std::vector<ProtrusionReport> reports(boxes.size());
  parallel_for(boxes.size(), [&](std::size_t i) {
    const Box& b = boxes[i];
    // One pixel of background margin keeps the image-border-as-background rule.
    const int top = b.r0 - 1, left = b.c0 - 1;
    BinaryMask cell(b.c1 - b.c0 + 3, b.r1 - b.r0 + 3);
    for (int r = b.r0; r <= b.r1; ++r)
      for (int c = b.c0; c <= b.c1; ++c) cell(r - top, c - left) = mask(r, c) == b.label ? 1 : 0;
    auto report = analyze_cell(cell, b.label, pixel_size_um, min_length_um);
    report.centroid = {report.centroid.row + top, report.centroid.col + left};
    for (auto& t : report.tips) t.tip = {t.tip.row + top, t.tip.col + left};
    reports[i] = std::move(report);
  });
  return reports;
}

}  // namespace migtk
