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

// Independent reference implementations shared by the unit and acceptance
// tests. Nothing here calls into the library code it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

struct Pt {
  double x, y;
};

// ------------------------------------------------------------- assignment

// Minimum over all injections truth j -> row perm[j], sums taken in truth
// order. cost is rows x cols row-major, rows >= cols.
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  if (cols == 0) return 0.0;
  std::vector<std::size_t> rows_idx(rows);
  std::iota(rows_idx.begin(), rows_idx.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  // Enumerate ordered selections of `cols` distinct rows.
  std::vector<std::size_t> pick(cols);
  std::vector<bool> used(rows, false);
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double acc) {
    if (j == cols) {
      best = std::min(best, acc);
      return;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (used[r]) continue;
      used[r] = true;
      rec(j + 1, acc + cost[r * cols + j]);
      used[r] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

// Lexicographically smallest truth-ordered row sequence among the exact
// minima. Only meaningful for costs whose sums are exact (small integers).
inline std::vector<std::size_t> brute_force_lex(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  const double best = brute_force_assignment(cost, rows, cols);
  std::vector<std::size_t> pick(cols), out;
  std::vector<bool> used(rows, false);
  bool found = false;
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double acc) {
    if (found) return;
    if (j == cols) {
      if (acc == best) {
        out = pick;
        found = true;
      }
      return;
    }
    for (std::size_t r = 0; r < rows && !found; ++r) {
      if (used[r]) continue;
      used[r] = true;
      pick[j] = r;
      rec(j + 1, acc + cost[r * cols + j]);
      used[r] = false;
    }
  };
  rec(0, 0.0);
  return out;
}

// ------------------------------------------------------------- geometry

inline bool inside(const std::vector<Pt>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

struct Box {
  double x0, y0, x1, y1;
};

inline Box bounds(const std::vector<Pt>& a) {
  Box b{a[0].x, a[0].y, a[0].x, a[0].y};
  for (const auto& p : a) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

inline double monte_carlo_area(const std::vector<Pt>& a, std::size_t samples, std::uint64_t seed) {
  const Box b = bounds(a);
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> ux(b.x0, b.x1), uy(b.y0, b.y1);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < samples; ++i) hit += inside(a, ux(g), uy(g)) ? 1 : 0;
  return (b.x1 - b.x0) * (b.y1 - b.y0) * static_cast<double>(hit) / static_cast<double>(samples);
}

inline double monte_carlo_iou(const std::vector<Pt>& a, const std::vector<Pt>& b, std::size_t samples,
                              std::uint64_t seed) {
  const Box ba = bounds(a), bb = bounds(b);
  const Box u{std::min(ba.x0, bb.x0), std::min(ba.y0, bb.y0), std::max(ba.x1, bb.x1), std::max(ba.y1, bb.y1)};
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> ux(u.x0, u.x1), uy(u.y0, u.y1);
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ux(g), y = uy(g);
    const bool ia = inside(a, x, y), ib = inside(b, x, y);
    both += (ia && ib) ? 1 : 0;
    either += (ia || ib) ? 1 : 0;
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

// Random convex polygon: sorted angles on a jittered ellipse.
inline std::vector<Pt> random_convex(std::mt19937_64& g, std::size_t n, double cx, double cy, double rx, double ry) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::vector<double> ang(n);
  for (auto& a : ang) a = u(g);
  std::sort(ang.begin(), ang.end());
  std::vector<Pt> out;
  for (double a : ang) out.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  return out;
}

// Equal arc-length resampling: counter-clockwise, starting at the vertex
// with the smallest (x, y).
inline std::vector<Pt> resample(std::vector<Pt> poly, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  if (s < 0) std::reverse(poly.begin(), poly.end());
  std::size_t first = 0;
  for (std::size_t i = 1; i < poly.size(); ++i)
    if (poly[i].x < poly[first].x || (poly[i].x == poly[first].x && poly[i].y < poly[first].y)) first = i;
  std::rotate(poly.begin(), poly.begin() + static_cast<long>(first), poly.end());
  const std::size_t n = poly.size();
  double perim = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    perim += std::hypot(poly[(i + 1) % n].x - poly[i].x, poly[(i + 1) % n].y - poly[i].y);
  std::vector<Pt> out;
  for (std::size_t j = 0; j < k; ++j) {
    double left = perim * static_cast<double>(j) / static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % n];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      if (left <= len || i + 1 == n) {
        const double t = len > 0 ? left / len : 0.0;
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        break;
      }
      left -= len;
    }
  }
  return out;
}

// Bilinear lookup in an H x W x C row-major map at normalized (x, y), cell
// centres at (j + 0.5) / W, neighbours clamped to the border.
template <typename T>
double bilinear(const T* f, std::size_t H, std::size_t W, std::size_t C, double x, double y, std::size_t c) {
  x = std::clamp(x, 0.0, 1.0) * static_cast<double>(W) - 0.5;
  y = std::clamp(y, 0.0, 1.0) * static_cast<double>(H) - 0.5;
  auto cell = [&](long r, long q) {
    r = std::clamp<long>(r, 0, static_cast<long>(H) - 1);
    q = std::clamp<long>(q, 0, static_cast<long>(W) - 1);
    return static_cast<double>(f[(static_cast<std::size_t>(r) * W + static_cast<std::size_t>(q)) * C + c]);
  };
  const long x0 = static_cast<long>(std::floor(x)), y0 = static_cast<long>(std::floor(y));
  const double ax = x - static_cast<double>(x0), ay = y - static_cast<double>(y0);
  return (1 - ay) * ((1 - ax) * cell(y0, x0) + ax * cell(y0, x0 + 1)) +
         ay * ((1 - ax) * cell(y0 + 1, x0) + ax * cell(y0 + 1, x0 + 1));
}

// ------------------------------------------------------------- strings

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
  return d[a.size()][b.size()];
}

inline std::string upper(std::string s) {
  for (auto& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
  return s;
}

// Exact non-negative fraction with 128-bit parts.
struct Frac {
  __int128 num = 0, den = 1;
  static __int128 gcd(__int128 a, __int128 b) {
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }
  Frac operator+(const Frac& o) const {
    Frac r{num * o.den + o.num * den, den * o.den};
    const __int128 g = gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }
  bool operator<(const Frac& o) const { return num * o.den < o.num * den; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Word-pair similarity as an exact fraction, zeroed below the floor.
inline Frac pair_similarity(const std::string& a, const std::string& b, double floor) {
  const std::string ua = upper(a), ub = upper(b);
  const std::size_t n = std::max(ua.size(), ub.size());
  if (n == 0) return {1, 1};
  const std::size_t keep = n - edit_distance(ua, ub);
  if (static_cast<double>(keep) < floor * static_cast<double>(n)) return {0, 1};
  return {static_cast<__int128>(keep), static_cast<__int128>(n)};
}

// Exhaustive best one-to-one pairing, normalized by the larger set size.
inline double frame_score(const std::vector<std::string>& q, const std::vector<std::string>& r, double floor) {
  if (q.empty() || r.empty()) return 0.0;
  const auto& small = q.size() <= r.size() ? q : r;
  const auto& large = q.size() <= r.size() ? r : q;
  std::vector<bool> used(large.size(), false);
  Frac best{0, 1};
  std::function<void(std::size_t, Frac)> rec = [&](std::size_t i, Frac acc) {
    if (i == small.size()) {
      if (best < acc) best = acc;
      return;
    }
    for (std::size_t j = 0; j < large.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      rec(i + 1, acc + pair_similarity(small[i], large[j], floor));
      used[j] = false;
    }
  };
  rec(0, Frac{0, 1});
  best.den *= static_cast<__int128>(large.size());
  return best.to_double();
}

struct SweepPoint {
  double threshold, precision, recall;
};

// For every distinct score t (descending): accept score >= t and count.
inline std::vector<SweepPoint> threshold_sweep(const std::vector<double>& scores, const std::vector<bool>& correct,
                                               std::size_t n_with_truth) {
  std::vector<double> ts = scores;
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<SweepPoint> out;
  for (double t : ts) {
    std::size_t acc = 0, hit = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] >= t) {
        ++acc;
        hit += correct[i] ? 1 : 0;
      }
    out.push_back({t, static_cast<double>(hit) / static_cast<double>(acc),
                   n_with_truth ? static_cast<double>(hit) / static_cast<double>(n_with_truth) : 0.0});
  }
  return out;
}

// ------------------------------------------------------------- gradients

// |a - n| / max(|a|, |n|, floor). The floor keeps near-zero gradients, whose
// relative error is dominated by rounding, from failing spuriously.
inline double grad_rel_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central difference of f around *x, using the representable step actually
// taken (*x restored afterwards).
template <typename T, typename F>
double central_difference(T* x, double h, F&& f) {
  const T orig = *x;
  const T xu = static_cast<T>(static_cast<double>(orig) + h);
  const T xd = static_cast<T>(static_cast<double>(orig) - h);
  *x = xu;
  const double up = f();
  *x = xd;
  const double down = f();
  *x = orig;
  return (up - down) / (static_cast<double>(xu) - static_cast<double>(xd));
}

}  // namespace oracle
