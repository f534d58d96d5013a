#include <doctest.h>

#include <random>

#include "migtk/raster.hpp"
#include "oracles.hpp"

using namespace migtk;

namespace {

GrayFrame frame_of(int w, int h, std::vector<std::uint16_t> v, int depth = 16) {
  return GrayFrame(Raster<std::uint16_t>(w, h, std::move(v)), depth);
}

}  // namespace

TEST_CASE("gray frame validates its construction") {
  CHECK_THROWS_AS(GrayFrame(Raster<std::uint16_t>(0, 0), 16), Error);
  CHECK_THROWS_AS(GrayFrame(Raster<std::uint16_t>(2, 2), 12), Error);
  CHECK_THROWS_AS(GrayFrame(Raster<std::uint16_t>(2, 2), 16, 0.0), Error);
  CHECK_THROWS_AS(frame_of(1, 1, {256}, 8), Error);
  const auto f = frame_of(1, 1, {255}, 8);
  CHECK(f.max_value() == 255);
  CHECK(f.pixel_size() == doctest::Approx(0.802));
}

TEST_CASE("normalize_percentile: constant frame maps to zeros") {
  const auto f = frame_of(4, 3, std::vector<std::uint16_t>(12, 500));
  const auto n = normalize_percentile(f);
  for (double v : n.values()) CHECK(v == 0.0);
}

TEST_CASE("normalize_percentile: full range is an identity rescale") {
  std::vector<std::uint16_t> v(101);
  for (int i = 0; i <= 100; ++i) v[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(i);
  const auto n = normalize_percentile(frame_of(101, 1, v), 0.0, 100.0);
  for (int i = 0; i <= 100; ++i) CHECK(n(0, i) == doctest::Approx(i / 100.0).epsilon(1e-15));
  CHECK(n(0, 0) == 0.0);
  CHECK(n(0, 100) == 1.0);
}

TEST_CASE("normalize_percentile matches a sort-based oracle on random frames") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> value(0, 65535);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint16_t> v(64 * 64);
    for (auto& x : v) x = static_cast<std::uint16_t>(value(rng));
    const auto f = frame_of(64, 64, v);
    const auto n = normalize_percentile(f, 0.1, 99.1);
    const std::vector<double> dv(v.begin(), v.end());
    const double a = oracle::sorted_percentile(dv, 0.1);
    const double b = oracle::sorted_percentile(dv, 99.1);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double expected = std::clamp((dv[i] - a) / (b - a), 0.0, 1.0);
      REQUIRE(n.values()[i] == expected);
      REQUIRE(n.values()[i] >= 0.0);
      REQUIRE(n.values()[i] <= 1.0);
    }
  }
}

TEST_CASE("normalize_percentile is idempotent on its output range") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> value(0, 4095);
  std::vector<std::uint16_t> v(32 * 32);
  for (auto& x : v) x = static_cast<std::uint16_t>(value(rng));
  const auto once = normalize_percentile(frame_of(32, 32, v), 0.0, 100.0);
  const auto twice = normalize_percentile(once, 0.0, 100.0);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice.values()[i] == doctest::Approx(once.values()[i]).epsilon(1e-12));
}

TEST_CASE("percentile rejects bad arguments") {
  const std::vector<double> empty;
  CHECK_THROWS_AS(percentile_nearest_rank(empty, 50), Error);
  const std::vector<double> one{3.0};
  CHECK_THROWS_AS(percentile_nearest_rank(one, 101), Error);
  CHECK(percentile_nearest_rank(one, 0) == 3.0);
  const auto f = frame_of(2, 1, {1, 2});
  CHECK_THROWS_AS(normalize_percentile(f, 50, 10), Error);
}

TEST_CASE("connected_components basics") {
  SUBCASE("all background") {
    const BinaryMask m(6, 6, 0);
    CHECK(connected_components(m).labels().empty());
  }
  SUBCASE("two squares in raster order") {
    BinaryMask m(10, 10, 0);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        m(r + 5, c) = 1;
        m(r, c + 6) = 1;
      }
    const auto l = connected_components(m);
    CHECK(l.labels() == std::vector<std::uint32_t>{1, 2});
    CHECK(l(0, 6) == 1);
    CHECK(l(5, 0) == 2);
  }
  SUBCASE("diagonal contact") {
    BinaryMask m(2, 2, 0);
    m(0, 0) = 1;
    m(1, 1) = 1;
    CHECK(connected_components(m, Connectivity::kEight).labels().size() == 1);
    CHECK(connected_components(m, Connectivity::kFour).labels().size() == 2);
  }
}

TEST_CASE("connected_components agrees with union-find on random masks") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::uniform_int_distribution<int> dim(1, 16);
    const int w = dim(rng), h = dim(rng);
    const auto m = fixture::random_mask(w, h, 0.45, rng);
    for (auto conn : {Connectivity::kFour, Connectivity::kEight}) {
      const auto labels = connected_components(m, conn);
      const int expected = oracle::count_components(m, static_cast<int>(conn));
      REQUIRE(labels.labels().size() == static_cast<std::size_t>(expected));
      // Labels are dense 1..n and cover exactly the foreground.
      REQUIRE(labels.max_label() == static_cast<std::uint32_t>(expected));
      for (std::size_t i = 0; i < m.size(); ++i) REQUIRE((m.values()[i] != 0) == (labels.values()[i] != 0));
    }
  }
}

TEST_CASE("region_pixels") {
  LabelMask m(6, 6, 0u);
  m(3, 4) = 7;
  CHECK(region_pixels(m, 7) == std::vector<Pixel>{{3, 4}});
  CHECK(region_pixels(m, 9).empty());
  CHECK_THROWS_AS(region_pixels(m, 0), Error);
  LabelMask sq(8, 8, 0u);
  for (int r = 1; r < 6; ++r)
    for (int c = 2; c < 7; ++c) sq(r, c) = 2;
  const auto px = region_pixels(sq, 2);
  CHECK(px.size() == 25);
  for (const auto& p : px) CHECK(sq[p] == 2);
}

TEST_CASE("dihedral transforms") {
  std::mt19937_64 rng(9);
  const auto m = fixture::random_label_mask(7, 4, 4, rng);
  CHECK(flip_horizontal(flip_horizontal(m)) == m);
  CHECK(flip_vertical(flip_vertical(m)) == m);
  CHECK(rotate90(rotate90(rotate90(rotate90(m, 1), 1), 1), 1) == m);
  CHECK(rotate90(m, 2) == rotate90(rotate90(m, 1), 1));
  CHECK(rotate90(m, 3) == rotate90(m, -1));
  for (int turns = 0; turns < 4; ++turns) {
    const auto out = rotate90(m, turns);
    for (int r = 0; r < m.height(); ++r)
      for (int c = 0; c < m.width(); ++c) CHECK(out[rotate90(Pixel{r, c}, m.width(), m.height(), turns)] == m(r, c));
  }
  const auto h = flip_horizontal(m);
  const auto v = flip_vertical(m);
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) {
      CHECK(h[flip_horizontal(Pixel{r, c}, m.width(), m.height())] == m(r, c));
      CHECK(v[flip_vertical(Pixel{r, c}, m.width(), m.height())] == m(r, c));
    }
}
