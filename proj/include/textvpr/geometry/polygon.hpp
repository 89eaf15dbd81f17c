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

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace textvpr::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Closed polygon, vertices in order, no repeated closing vertex. Coordinates
// are pixel-space unless `normalized` is set (then [0,1]^2).
class Polygon {
 public:
  Polygon() = default;
  // Throws ContractError for fewer than 3 vertices or non-finite coordinates.
  explicit Polygon(std::vector<Point> vertices, bool normalized = false);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool normalized() const { return normalized_; }
  bool empty() const { return vertices_.empty(); }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> vertices_;
  bool normalized_ = false;
};

// Shoelace sum; positive for counter-clockwise (x right, y up) order.
double signed_area(std::span<const Point> pts);

double polygon_area(const Polygon& p);

double perimeter(const Polygon& p);

bool is_convex(const Polygon& p);

// False when any two non-adjacent edges intersect.
bool is_simple(const Polygon& p);

// Counter-clockwise order starting at the lexicographically smallest vertex
// (min x, then min y). Consecutive duplicate vertices are dropped.
Polygon canonicalize(const Polygon& p);

// Clips `subject` against the convex counter-clockwise `clip` polygon
// (Sutherland-Hodgman). Returns the possibly empty vertex list.
std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip);

// Ear-clipping triangulation of a simple polygon.
std::vector<std::array<Point, 3>> triangulate(const Polygon& p);

// Area of intersection, exact for simple polygons.
double intersection_area(const Polygon& a, const Polygon& b);

// Intersection over union in [0,1]. Zero-area inputs score 0. Throws
// ContractError when the coordinate spaces differ or an input self-intersects.
double polygon_iou(const Polygon& a, const Polygon& b);

// k points equally spaced by arc length, starting at the canonical start
// vertex and proceeding counter-clockwise. k must be even and >= 4.
Polygon resample_polygon(const Polygon& p, std::size_t k);

// Intersection with the axis-aligned rectangle [0,w] x [0,h]; empty polygon
// when nothing remains.
Polygon clip_to_rect(const Polygon& p, double width, double height);

Polygon scaled(const Polygon& p, double sx, double sy, bool normalized);

}  // namespace textvpr::geometry
