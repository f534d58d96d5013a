#include <doctest.h>

#include <cmath>
#include <random>

#include "migtk/morphology.hpp"
#include "oracles.hpp"

using namespace migtk;

namespace {

BinaryMask block(int w, int h, int top, int left, int bh, int bw) {
  BinaryMask m(w, h, 0);
  for (int r = top; r < top + bh; ++r)
    for (int c = left; c < left + bw; ++c) m(r, c) = 1;
  return m;
}

BinaryMask disk(int size, int radius) { return fixture::axis_star(size, radius, {}).mask; }

}  // namespace

TEST_CASE("edt small cases") {
  BinaryMask one(5, 5, 0);
  one(2, 2) = 1;
  CHECK(euclidean_distance_transform(one)(2, 2) == 1.0);

  const auto sq = euclidean_distance_transform(block(7, 7, 2, 2, 3, 3));
  CHECK(sq(3, 3) == 2.0);
  CHECK(sq(2, 3) == 1.0);
  CHECK(sq(2, 2) == 1.0);
  CHECK(sq(0, 0) == 0.0);

  const auto full = euclidean_distance_transform(block(5, 5, 0, 0, 5, 5));
  CHECK(full(2, 2) == 3.0);
  CHECK(full(0, 0) == 1.0);
}

TEST_CASE("edt equals brute force on random masks") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> dim(1, 24);
    std::uniform_real_distribution<double> density(0.3, 1.0);
    const auto m = fixture::random_mask(dim(rng), dim(rng), density(rng), rng);
    REQUIRE(euclidean_distance_transform(m).values == oracle::brute_force_edt(m));
  }
}

TEST_CASE("body centroid") {
  CHECK(body_centroid(disk(31, 9)) == Pixel{15, 15});
  BinaryMask one(4, 4, 0);
  one(1, 2) = 1;
  CHECK(body_centroid(one) == Pixel{1, 2});
  const auto rect = block(9, 7, 2, 2, 3, 5);
  CHECK(body_centroid(rect) == Pixel{3, 3});
  CHECK(body_centroid(rect) == oracle::brute_force_centroid(rect));
  CHECK_THROWS_AS(body_centroid(BinaryMask(3, 3, 0)), Error);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto m = fixture::random_connected_mask(15, 15, 60, rng);
    REQUIRE(body_centroid(m) == oracle::brute_force_centroid(m));
  }
}

TEST_CASE("geodesic distance along corridors") {
  const auto line = block(12, 3, 1, 0, 1, 12);
  const auto g = geodesic_distance(line, {1, 0});
  CHECK(g(1, 11) == 11.0);
  CHECK(g(1, 0) == 0.0);
  CHECK(std::isinf(g(0, 0)));

  // U shape: two vertical arms joined at the bottom. Ends at (0,0) and (0,2).
  BinaryMask u(3, 10, 0);
  for (int r = 0; r < 10; ++r) u(r, 0) = u(r, 2) = 1;
  u(9, 1) = 1;
  const auto gu = geodesic_distance(u, {0, 0});
  // 8 unit steps down, two diagonals through (9,1), 8 unit steps up.
  CHECK(gu(0, 2) == doctest::Approx(16 + 2 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(gu(0, 2) > 2.0);
  CHECK_THROWS_AS(geodesic_distance(u, {0, 1}), Error);
}

TEST_CASE("geodesic distance equals relaxation oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = fixture::random_connected_mask(14, 12, 70, rng);
    Pixel seed{};
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.values()[i]) {
        seed = m.pixel(i);
        break;
      }
    const auto got = geodesic_distance(m, seed);
    const auto want = oracle::relaxation_geodesic(m, seed);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (std::isinf(want.values()[i])) {
        REQUIRE(std::isinf(got.values.values()[i]));
      } else {
        REQUIRE(std::abs(got.values.values()[i] - want.values()[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("thinning") {
  SUBCASE("thin line is unchanged") {
    const auto line = block(12, 5, 2, 1, 1, 10);
    const auto s = skeletonize(line);
    CHECK(s.skeleton == line);
    CHECK(s.endpoints == std::vector<Pixel>{{2, 1}, {2, 10}});
    CHECK(s.branch_points.empty());
  }
  SUBCASE("isolated pixel survives as one endpoint") {
    BinaryMask m(3, 3, 0);
    m(1, 1) = 1;
    const auto s = skeletonize(m);
    CHECK(s.skeleton == m);
    CHECK(s.endpoints.size() == 1);
  }
  SUBCASE("3x9 rectangle matches the published rules") {
    const auto rect = block(11, 5, 1, 1, 3, 9);
    const auto got = thin(rect);
    const auto want = oracle::zhang_suen_reference(rect);
    CHECK(got == want);
    // A single horizontal path along the middle row.
    int on = 0;
    for (int c = 0; c < 11; ++c) on += got(2, c);
    CHECK(on == static_cast<int>(got.count()));
    CHECK(skeletonize(rect).endpoints.size() == 2);
  }
  SUBCASE("2x2 square does not vanish") {
    const auto sq = block(4, 4, 1, 1, 2, 2);
    CHECK(thin(sq).count() >= 1);
  }
}

TEST_CASE("thinning preserves component count and stays inside the mask") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = fixture::random_mask(20, 20, 0.55, rng);
    const auto s = thin(m);
    REQUIRE(oracle::count_components(s, 8) == oracle::count_components(m, 8));
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE((s.values()[i] == 0 || m.values()[i] != 0));
    REQUIRE(thin(s) == s);
  }
}

TEST_CASE("protrusions on a disk and a star") {
  const auto round = analyze_cell(disk(41, 10), 1, 0.802, 20.0);
  CHECK(round.tips.empty());

  const auto star = fixture::axis_star(161, 10, {60, 60, 60, 0});
  const auto rep = analyze_cell(star.mask, 1, 0.802, 20.0);
  CHECK(rep.centroid == star.center);
  REQUIRE(rep.tips.size() == 3);
  for (const auto& t : rep.tips) {
    CHECK(t.length_um >= 48.0);
    CHECK(t.length_um <= 57.0);
    const double oracle_len = oracle::relaxation_geodesic(star.mask, star.center)[t.tip] * 0.802;
    CHECK(std::abs(t.length_um - oracle_len) <= 1e-9);
  }

  const auto shorter = fixture::axis_star(161, 10, {60, 12, 60, 0});
  const auto rep2 = analyze_cell(shorter.mask, 1, 0.802, 20.0);
  CHECK(rep2.tips.size() == 2);
  for (const auto& t : rep2.tips) CHECK(t.tip != shorter.tips[1]);
  // The 5 um annotation threshold would keep the short arm.
  CHECK(analyze_cell(shorter.mask, 1, 0.802, 5.0).tips.size() == 3);
}

TEST_CASE("detect_protrusions maps results back to image coordinates") {
  const auto star = fixture::axis_star(161, 10, {60, 60, 60, 0});
  LabelMask labels(200, 180, 0u);
  for (int r = 0; r < 161; ++r)
    for (int c = 0; c < 161; ++c)
      if (star.mask(r, c)) labels(r + 5, c + 30) = 9;
  labels(2, 2) = 3;
  const auto reports = detect_protrusions(labels);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].label == 3);
  CHECK(reports[0].tips.empty());
  CHECK(reports[1].label == 9);
  CHECK(reports[1].centroid == Pixel{star.center.row + 5, star.center.col + 30});
  REQUIRE(reports[1].tips.size() == 3);
  std::vector<Pixel> tips;
  for (const auto& t : reports[1].tips) tips.push_back({t.tip.row - 5, t.tip.col - 30});
  std::sort(tips.begin(), tips.end());
  auto expected = star.tips;
  std::sort(expected.begin(), expected.end());
  CHECK(tips == expected);
  CHECK_THROWS_AS(detect_protrusions(labels, 0.0), Error);
}

TEST_CASE("protrusion lengths are invariant under flips and quarter turns") {
  const auto star = fixture::axis_star(101, 8, {40, 30, 0, 35});
  const auto base = analyze_cell(star.mask, 1, 0.802, 20.0);
  std::vector<double> lengths;
  for (const auto& t : base.tips) lengths.push_back(t.length_um);
  std::sort(lengths.begin(), lengths.end());
  for (int turns = 1; turns < 4; ++turns) {
    const auto rep = analyze_cell(rotate90(star.mask, turns), 1, 0.802, 20.0);
    std::vector<double> got;
    for (const auto& t : rep.tips) got.push_back(t.length_um);
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == lengths.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(lengths[i]).epsilon(1e-12));
  }
  const auto flipped = analyze_cell(flip_horizontal(star.mask), 1, 0.802, 20.0);
  CHECK(flipped.tips.size() == lengths.size());
}
