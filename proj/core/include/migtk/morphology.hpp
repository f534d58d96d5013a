#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "migtk/raster.hpp"

namespace migtk {

inline constexpr double kDefaultMinProtrusionUm = 20.0;
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

enum class DistanceMetric { kEuclideanToBackground, kGeodesicFromSeed };

struct DistanceField {
  Raster<double> values;
  DistanceMetric metric = DistanceMetric::kEuclideanToBackground;

  double operator()(int row, int col) const noexcept { return values(row, col); }
  double operator[](Pixel p) const noexcept { return values[p]; }
};

// Exact Euclidean distance (pixels) from each foreground pixel to the nearest
// background pixel; pixels outside the image count as background.
DistanceField euclidean_distance_transform(const BinaryMask& mask);

// Argmax of the EDT, ties broken by smallest (row, col).
Pixel body_centroid(const BinaryMask& mask);

// Shortest path inside the foreground on the 8-connected grid with step
// costs 1 and sqrt(2). Unreachable foreground and all background pixels hold
// kUnreachable.
DistanceField geodesic_distance(const BinaryMask& mask, Pixel seed);

struct SkeletonGraph {
  BinaryMask skeleton;
  std::vector<Pixel> endpoints;      // <= 1 skeleton neighbour (isolated pixels included)
  std::vector<Pixel> branch_points;  // >= 3 skeleton neighbours
};

// Two-subiteration thinning (Zhang-Suen deletion rules). Each marked pixel is
// removed only while it is still a simple point, so the 8-connected component
// count of the input is preserved.
BinaryMask thin(const BinaryMask& mask);

int skeleton_neighbours(const BinaryMask& skeleton, int row, int col);

SkeletonGraph skeletonize(const BinaryMask& mask);

struct ProtrusionTip {
  Pixel tip;
  double length_um = 0.0;
};

struct ProtrusionReport {
  std::uint32_t label = 0;
  Pixel centroid;
  std::vector<ProtrusionTip> tips;
  double pixel_size_um = kDefaultPixelSizeUm;
};

// Per label: EDT-argmax body centroid, skeleton endpoints as candidate tips,
// geodesic centroid-to-tip length in micrometres, tips shorter than
// min_length_um discarded. Lengths include the body radius.
std::vector<ProtrusionReport> detect_protrusions(const LabelMask& mask, double pixel_size_um = kDefaultPixelSizeUm,
                                                 double min_length_um = kDefaultMinProtrusionUm);

ProtrusionReport analyze_cell(const BinaryMask& cell, std::uint32_t label, double pixel_size_um,
                              double min_length_um);

}  // namespace migtk
