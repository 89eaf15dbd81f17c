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

#include "textvpr/geometry/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "textvpr/core/error.hpp"

namespace textvpr::geometry {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool lex_less(const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

int orientation(const Point& a, const Point& b, const Point& c) {
  const double v = cross(a, b, c);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment(const Point& p, const Point& a, const Point& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// Orientation with near-collinear triples snapped to 0, so points sampled
// along a straight edge do not register as crossings.
int orientation_tol(const Point& a, const Point& b, const Point& c) {
  const double v = cross(a, b, c);
  const double scale = std::hypot(b.x - a.x, b.y - a.y) * std::hypot(c.x - a.x, c.y - a.y);
  if (std::abs(v) <= 1e-10 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const int o1 = orientation_tol(p1, p2, q1), o2 = orientation_tol(p1, p2, q2);
  const int o3 = orientation_tol(q1, q2, p1), o4 = orientation_tol(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

std::vector<Point> dedupe(const std::vector<Point>& v) {
  std::vector<Point> out;
  out.reserve(v.size());
  for (const auto& p : v)
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

double area_tolerance(const Polygon& a) {
  double extent = 0.0;
  for (const auto& p : a.vertices()) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  return 1e-12 * std::max(1.0, extent * extent);
}

bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  return cross(a, b, p) >= 0 && cross(b, c, p) >= 0 && cross(c, a, p) >= 0;
}

// Orders two polygons deterministically so symmetric operations evaluate the
// same floating-point expression regardless of argument order.
bool canonical_before(const Polygon& a, const Polygon& b) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  if (va.size() != vb.size()) return va.size() < vb.size();
  return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end(),
                                      [](const Point& p, const Point& q) { return lex_less(p, q); });
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices, bool normalized)
    : vertices_(std::move(vertices)), normalized_(normalized) {
  if (vertices_.size() < 3)
    throw ContractError("polygon needs at least 3 vertices, got " + std::to_string(vertices_.size()));
  for (const auto& p : vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ContractError("polygon has a non-finite vertex");
}

double signed_area(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

double polygon_area(const Polygon& p) {
  if (p.size() < 3) throw ContractError("polygon_area: polygon needs at least 3 vertices");
  return std::abs(signed_area(p.vertices()));
}

double perimeter(const Polygon& p) {
  double len = 0.0;
  const auto& v = p.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    len += std::hypot(b.x - a.x, b.y - a.y);
  }
  return len;
}

bool is_convex(const Polygon& p) {
  const auto& v = p.vertices();
  const std::size_t n = v.size();
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int o = orientation(v[i], v[(i + 1) % n], v[(i + 2) % n]);
    if (o == 0) continue;
    if (sign == 0)
      sign = o;
    else if (o != sign)
      return false;
  }
  return is_simple(p);
}

bool is_simple(const Polygon& p) {
  const auto& v = p.vertices();
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a1 = v[i];
    const Point& a2 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(a1, a2, v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

Polygon canonicalize(const Polygon& p) {
  auto v = dedupe(p.vertices());
  if (v.size() < 3) throw ContractError("canonicalize: fewer than 3 distinct vertices");
  if (signed_area(v) < 0) std::reverse(v.begin(), v.end());
  const auto start = std::min_element(v.begin(), v.end(), lex_less);
  std::rotate(v.begin(), start, v.end());
  return Polygon(std::move(v), p.normalized());
}

std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
  std::vector<Point> output(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point& c1 = clip[e];
    const Point& c2 = clip[(e + 1) % m];
    std::vector<Point> input;
    input.swap(output);
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& cur = input[i];
      const Point& prev = input[(i + n - 1) % n];
      const double dc = cross(c1, c2, cur);
      const double dp = cross(c1, c2, prev);
      if (dc >= 0) {
        if (dp < 0) {
          const double t = dp / (dp - dc);
          output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
        }
        output.push_back(cur);
      } else if (dp >= 0) {
        const double t = dp / (dp - dc);
        output.push_back({prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)});
      }
    }
  }
  return output;
}

std::vector<std::array<Point, 3>> triangulate(const Polygon& p) {
  auto v = dedupe(p.vertices());
  if (signed_area(v) < 0) std::reverse(v.begin(), v.end());
  std::vector<std::array<Point, 3>> tris;
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  while (idx.size() > 3) {
    const std::size_t n = idx.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = v[idx[(i + n - 1) % n]];
      const Point& b = v[idx[i]];
      const Point& c = v[idx[(i + 1) % n]];
      const double turn = cross(a, b, c);
      if (turn == 0.0) {
        // Collinear vertex contributes no area.
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
      if (turn < 0) continue;
      bool contains = false;
      for (std::size_t j = 0; j < n && !contains; ++j) {
        const std::size_t k = idx[j];
        if (k == idx[(i + n - 1) % n] || k == idx[i] || k == idx[(i + 1) % n]) continue;
        contains = point_in_triangle(v[k], a, b, c);
      }
      if (contains) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) {
      // Numerically stuck; fan out the remainder.
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) tris.push_back({v[idx[0]], v[idx[i]], v[idx[i + 1]]});
      return tris;
    }
  }
  if (idx.size() == 3 && cross(v[idx[0]], v[idx[1]], v[idx[2]]) != 0.0)
    tris.push_back({v[idx[0]], v[idx[1]], v[idx[2]]});
  return tris;
}

double intersection_area(const Polygon& a, const Polygon& b) {
  if (is_convex(a) && is_convex(b)) {
    auto va = canonicalize(a).vertices();
    auto vb = canonicalize(b).vertices();
    return std::abs(signed_area(clip_convex(va, vb)));
  }
  const auto ta = triangulate(a);
  const auto tb = triangulate(b);
  double total = 0.0;
  for (const auto& t1 : ta)
    for (const auto& t2 : tb) total += std::abs(signed_area(clip_convex(t1, t2)));
  return total;
}

double polygon_iou(const Polygon& a, const Polygon& b) {
  if (a.normalized() != b.normalized())
    throw ContractError("polygon_iou: mixing normalized and pixel-space polygons");
  if (a.size() < 3 || b.size() < 3) throw ContractError("polygon_iou: polygon needs at least 3 vertices");
  const bool swap = canonical_before(b, a);
  const Polygon& first = swap ? b : a;
  const Polygon& second = swap ? a : b;
  const double area1 = polygon_area(first);
  const double area2 = polygon_area(second);
  if (area1 <= area_tolerance(first) || area2 <= area_tolerance(second)) return 0.0;
  if (!is_simple(first) || !is_simple(second))
    throw ContractError("polygon_iou: self-intersecting polygon");
  const double inter = intersection_area(first, second);
  const double uni = area1 + area2 - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Polygon resample_polygon(const Polygon& p, std::size_t k) {
  if (k < 4 || k % 2 != 0)
    throw ContractError("resample_polygon: k must be even and >= 4, got " + std::to_string(k));
  const Polygon c = canonicalize(p);
  const auto& v = c.vertices();
  const std::size_t n = v.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % n];
    cum[i + 1] = cum[i] + std::hypot(b.x - a.x, b.y - a.y);
  }
  const double total = cum[n];
  if (!(total > 1e-12)) throw ContractError("resample_polygon: degenerate perimeter");
  std::vector<Point> out;
  out.reserve(k);
  std::size_t edge = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(k);
    while (edge + 1 < n && cum[edge + 1] <= target) ++edge;
    const double len = cum[edge + 1] - cum[edge];
    const double t = len > 0 ? (target - cum[edge]) / len : 0.0;
    const auto& a = v[edge];
    const auto& b = v[(edge + 1) % n];
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return Polygon(std::move(out), p.normalized());
}

Polygon clip_to_rect(const Polygon& p, double width, double height) {
  const std::vector<Point> rect{{0, 0}, {width, 0}, {width, height}, {0, height}};
  std::vector<Point> subject = p.vertices();
  if (signed_area(subject) < 0) std::reverse(subject.begin(), subject.end());
  auto clipped = dedupe(clip_convex(subject, rect));
  if (clipped.size() < 3 || std::abs(signed_area(clipped)) <= 0.0) return Polygon();
  return canonicalize(Polygon(std::move(clipped), p.normalized()));
}

Polygon scaled(const Polygon& p, double sx, double sy, bool normalized) {
  std::vector<Point> v;
  v.reserve(p.size());
  for (const auto& q : p.vertices()) v.push_back({q.x * sx, q.y * sy});
  return Polygon(std::move(v), normalized);
}

}  // namespace textvpr::geometry
