// Copyright 2026 The textvpr Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "textvpr/core/error.hpp"
#include "textvpr/geometry/polygon.hpp"

using namespace textvpr;
using namespace textvpr::geometry;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) { return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}); }

Polygon to_polygon(const std::vector<oracle::Pt>& pts) {
  std::vector<Point> v;
  for (const auto& p : pts) v.push_back({p.x, p.y});
  return Polygon(v);
}

std::vector<oracle::Pt> to_pts(const Polygon& p) {
  std::vector<oracle::Pt> v;
  for (const auto& q : p.vertices()) v.push_back({q.x, q.y});
  return v;
}

// Convex hexagon with vertex angles jittered around the regular layout.
Polygon random_hexagon(std::mt19937_64& g, double cx, double cy, double rx, double ry) {
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<Point> v;
  for (int i = 0; i < 6; ++i) {
    const double a = (i + jitter(g)) * M_PI / 3.0;
    v.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return Polygon(v);
}

Polygon l_shape() { return Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("area examples") {
  CHECK(polygon_area(rect(0, 0, 1, 1)) == doctest::Approx(1.0));
  CHECK(polygon_area(Polygon({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(0.5));
  CHECK(polygon_area(l_shape()) == doctest::Approx(3.0));
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), ContractError);
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, NAN}, {0, 1}}), ContractError);
}

TEST_CASE("area of random convex polygons matches Monte-Carlo") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 3; ++trial) {
    const auto pts = oracle::random_convex(g, 7, 10, 20, 6, 3);
    const double mc = oracle::monte_carlo_area(pts, 1000000, 100 + trial);
    const double a = polygon_area(to_polygon(pts));
    CHECK(std::abs(a - mc) / a < 2e-3);
  }
}

TEST_CASE("iou examples") {
  const auto sq = rect(0, 0, 1, 1);
  CHECK(polygon_iou(sq, sq) == doctest::Approx(1.0));
  CHECK(polygon_iou(sq, rect(3, 3, 4, 4)) == 0.0);
  CHECK(polygon_iou(sq, rect(0.5, 0.5, 1.5, 1.5)) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  const double mc = oracle::monte_carlo_iou(to_pts(sq), to_pts(rect(0.5, 0.5, 1.5, 1.5)), 400000, 9);
  CHECK(std::abs(mc - 1.0 / 7.0) < 3e-3);
}

TEST_CASE("iou mixed coordinate spaces is a contract error") {
  const Polygon a({{0, 0}, {1, 0}, {1, 1}}, false);
  const Polygon b({{0, 0}, {1, 0}, {1, 1}}, true);
  CHECK_THROWS_AS(polygon_iou(a, b), ContractError);
}

TEST_CASE("degenerate polygons score zero") {
  const Polygon flat({{0, 0}, {1, 0}, {2, 0}});
  CHECK(polygon_area(flat) == 0.0);
  CHECK(polygon_iou(flat, rect(0, -1, 2, 1)) == 0.0);
}

TEST_CASE("self-intersecting input is rejected by iou") {
  const Polygon bowtie({{0, 0}, {2, 2}, {2, 0}, {0, 1}});
  CHECK_FALSE(is_simple(bowtie));
  CHECK(is_simple(l_shape()));
  CHECK_THROWS_AS(polygon_iou(bowtie, rect(0, 0, 1, 1)), ContractError);
}

TEST_CASE("non-convex iou matches Monte-Carlo") {
  const auto l = l_shape();
  CHECK_FALSE(is_convex(l));
  for (const auto& other : {rect(0.5, 0.5, 1.5, 1.5), rect(-0.5, 1.2, 0.8, 2.5), rect(1.2, 1.2, 2.2, 2.2)}) {
    const double mc = oracle::monte_carlo_iou(to_pts(l), to_pts(other), 400000, 17);
    CHECK(std::abs(polygon_iou(l, other) - mc) < 4e-3);
  }
  CHECK(intersection_area(l, rect(1.2, 1.2, 2.2, 2.2)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("triangulation covers the polygon") {
  const auto l = l_shape();
  const auto tris = triangulate(l);
  CHECK(tris.size() == 4);
  double total = 0.0;
  for (const auto& t : tris) total += std::abs(signed_area(t));
  CHECK(total == doctest::Approx(3.0));
}

TEST_CASE("iou symmetry, range and scale invariance") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> c(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = to_polygon(oracle::random_convex(g, 3 + trial % 6, c(g), c(g), 1.5, 1.0));
    const auto b = to_polygon(oracle::random_convex(g, 3 + trial % 5, c(g), c(g), 1.0, 2.0));
    const double ab = polygon_iou(a, b);
    CHECK(ab == polygon_iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    const double s = 37.5;
    CHECK(std::abs(polygon_iou(scaled(a, s, s, false), scaled(b, s, s, false)) - ab) < 1e-9);
  }
}

TEST_CASE("canonicalize orders counter-clockwise from the smallest vertex") {
  const Polygon cw({{1, 1}, {1, 0}, {0, 0}, {0, 1}});
  const auto c = canonicalize(cw);
  CHECK(c.vertices().front() == Point{0, 0});
  CHECK(signed_area(c.vertices()) > 0.0);
  const auto twice = canonicalize(c);
  CHECK(twice == c);
}

TEST_CASE("resample examples") {
  const auto sq = rect(0, 0, 1, 1);
  const auto r4 = resample_polygon(sq, 4);
  REQUIRE(r4.size() == 4);
  const std::vector<Point> corners{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r4.vertices()[i].x == doctest::Approx(corners[i].x));
    CHECK(r4.vertices()[i].y == doctest::Approx(corners[i].y));
  }
  const auto r8 = resample_polygon(sq, 8);
  const std::vector<Point> eight{{0, 0}, {0.5, 0}, {1, 0}, {1, 0.5}, {1, 1}, {0.5, 1}, {0, 1}, {0, 0.5}};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(r8.vertices()[i].x == doctest::Approx(eight[i].x));
    CHECK(r8.vertices()[i].y == doctest::Approx(eight[i].y));
  }
  // Equal arc-length spacing cuts corners: the unit square at k=6 keeps 5/6
  // of its area, an equilateral triangle at k=8 about 94%.
  CHECK(polygon_area(resample_polygon(sq, 6)) == doctest::Approx(1.0 - 2.0 * 0.5 * (1.0 / 3.0) * (1.0 / 3.0)));
  CHECK_THROWS_AS(resample_polygon(sq, 5), ContractError);
  CHECK_THROWS_AS(resample_polygon(sq, 2), ContractError);
  CHECK_THROWS_AS(resample_polygon(Polygon({{1, 1}, {1, 1}, {1, 1}}), 8), ContractError);
}

TEST_CASE("resample matches an arc-length walk") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = oracle::random_convex(g, 6, 50, 50, 20, 10);
    const auto want = oracle::resample(pts, 16);
    const auto got = resample_polygon(to_polygon(pts), 16);
    REQUIRE(got.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) {
      CHECK(got.vertices()[i].x == doctest::Approx(want[i].x).epsilon(1e-12));
      CHECK(got.vertices()[i].y == doctest::Approx(want[i].y).epsilon(1e-12));
    }
  }
}

TEST_CASE("resampled hexagons stay close to the original") {
  // Regular unit hexagon at k=16: four corners are cut with legs 1/4 and 1/8.
  std::vector<Point> v;
  for (int i = 0; i < 6; ++i) v.push_back({std::cos(i * M_PI / 3.0), std::sin(i * M_PI / 3.0)});
  const Polygon hex(v);
  const double area = 1.5 * std::sqrt(3.0);
  const double cut = 4.0 * 0.5 * 0.25 * 0.125 * std::sin(2.0 * M_PI / 3.0);
  CHECK(polygon_iou(hex, resample_polygon(hex, 16)) == doctest::Approx((area - cut) / area).epsilon(1e-12));

  std::mt19937_64 g(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_hexagon(g, 50, 50, 20, 12);
    const auto r = resample_polygon(h, 16);
    CHECK(polygon_iou(h, r) > 0.95);
    CHECK(polygon_iou(h, resample_polygon(h, 64)) > 0.99);
  }
}

TEST_CASE("resampling an equally spaced k-gon is the identity") {
  for (std::size_t k : {8, 16, 24}) {
    // Circle: every vertex is already equally spaced.
    std::vector<Point> c;
    for (std::size_t i = 0; i < k; ++i) c.push_back({std::cos(2.0 * M_PI * i / k), std::sin(2.0 * M_PI * i / k)});
    const auto once = resample_polygon(Polygon(c), k);
    CHECK(polygon_iou(Polygon(c), once) > 0.999);
    CHECK(polygon_iou(once, resample_polygon(once, k)) > 0.999);
  }
}

TEST_CASE("clip to rect") {
  const auto clipped = clip_to_rect(rect(-1, -1, 1, 1), 4, 4);
  CHECK(polygon_area(clipped) == doctest::Approx(1.0));
  CHECK(clip_to_rect(rect(5, 5, 6, 6), 4, 4).empty());
}

}  // TEST_SUITE
