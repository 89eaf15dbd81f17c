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

#include <algorithm>
#include <cmath>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/core/rng.hpp"
#include "textvpr/synth/font.hpp"
#include "textvpr/synth/scene.hpp"

namespace textvpr::synth {

namespace {

// Horizontal advance is one glyph plus one dot of spacing.
double glyph_width(double scale) { return scale * kGlyphCols / kGlyphRows; }
double dot_size(double scale) { return scale / kGlyphRows; }

bool inked(const WordSpec& w, double u, double v, double width) {
  const double height = w.scale;
  if (u < 0 || v < 0 || u >= width || v >= height) return false;
  const double gw = glyph_width(w.scale);
  const double advance = gw + dot_size(w.scale);
  const auto idx = static_cast<std::size_t>(u / advance);
  if (idx >= w.text.size()) return false;
  const double gu = u - static_cast<double>(idx) * advance;
  if (gu >= gw) return false;
  const auto col = std::min<std::size_t>(kGlyphCols - 1, static_cast<std::size_t>(gu / gw * kGlyphCols));
  const auto row = std::min<std::size_t>(kGlyphRows - 1, static_cast<std::size_t>(v / height * kGlyphRows));
  return glyph_dot(w.text[idx], col, row);
}

}  // namespace

double word_width(std::size_t length, double scale) {
  if (length == 0) return 0.0;
  return static_cast<double>(length) * glyph_width(scale) + static_cast<double>(length - 1) * dot_size(scale);
}

std::vector<geometry::Point> word_quad(const WordSpec& word) {
  const double hw = word_width(word.text.size(), word.scale) / 2.0;
  const double hh = word.scale / 2.0;
  const double c = std::cos(word.rotation), s = std::sin(word.rotation);
  const geometry::Point local[4] = {{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}};
  std::vector<geometry::Point> out;
  for (const auto& p : local)
    out.push_back({word.anchor.x + c * p.x - s * p.y, word.anchor.y + s * p.x + c * p.y});
  return out;
}

void validate(const SceneSpec& spec) {
  if (spec.width == 0 || spec.height == 0) throw ContractError("render_frame: zero-area canvas");
  if (!(spec.illumination_gain > 0.0)) throw ContractError("render_frame: illumination gain must be positive");
  if (!(spec.noise_sigma >= 0.0)) throw ContractError("render_frame: noise sigma must be non-negative");
  for (const auto& w : spec.words) {
    if (w.text.empty() || w.text.size() > kMaxWordLength)
      throw ContractError("render_frame: word length must be in [1, 25], got '" + w.text + "'");
    for (char ch : w.text)
      if (charset_index(ch) < 0) throw ContractError("render_frame: word '" + w.text + "' has symbols outside the charset");
    if (!(w.occlusion_fraction >= 0.0 && w.occlusion_fraction < 1.0))
      throw ContractError("render_frame: occlusion fraction must be in [0, 1)");
    if (!(w.scale > 0.0)) throw ContractError("render_frame: scale must be positive");
  }
}

RenderedFrame render_frame(const SceneSpec& spec) {
  validate(spec);
  const std::size_t width = spec.width, height = spec.height;
  std::vector<double> canvas(width * height, kBackground);

  RenderedFrame out;
  for (const auto& w : spec.words) {
    const auto quad = word_quad(w);
    const double ww = word_width(w.text.size(), w.scale);
    double x0 = quad[0].x, x1 = quad[0].x, y0 = quad[0].y, y1 = quad[0].y;
    for (const auto& p : quad) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    const auto lo_x = static_cast<long>(std::max(0.0, std::floor(x0)));
    const auto hi_x = static_cast<long>(std::min<double>(static_cast<double>(width) - 1, std::ceil(x1)));
    const auto lo_y = static_cast<long>(std::max(0.0, std::floor(y0)));
    const auto hi_y = static_cast<long>(std::min<double>(static_cast<double>(height) - 1, std::ceil(y1)));
    const double c = std::cos(w.rotation), s = std::sin(w.rotation);
    for (long py = lo_y; py <= hi_y; ++py) {
      for (long px = lo_x; px <= hi_x; ++px) {
        const double dx = static_cast<double>(px) + 0.5 - w.anchor.x;
        const double dy = static_cast<double>(py) + 0.5 - w.anchor.y;
        // Inverse rotation back into the word frame.
        const double u = c * dx + s * dy + ww / 2.0;
        const double v = -s * dx + c * dy + w.scale / 2.0;
        if (inked(w, u, v, ww)) canvas[static_cast<std::size_t>(py) * width + static_cast<std::size_t>(px)] = kInk;
      }
    }
    if (w.occlusion_fraction > 0.0) {
      const double ox0 = x1 - w.occlusion_fraction * (x1 - x0);
      for (long py = lo_y; py <= hi_y; ++py)
        for (long px = lo_x; px <= hi_x; ++px) {
          const double cx = static_cast<double>(px) + 0.5, cy = static_cast<double>(py) + 0.5;
          if (cx >= ox0 && cx <= x1 && cy >= y0 && cy <= y1)
            canvas[static_cast<std::size_t>(py) * width + static_cast<std::size_t>(px)] = kOccluder;
        }
    }
    auto clipped = geometry::clip_to_rect(geometry::Polygon(quad), static_cast<double>(width),
                                          static_cast<double>(height));
    if (!clipped.empty()) out.truth.push_back(TextInstance{std::move(clipped), w.text, 1.0});
  }

  Rng rng(spec.seed);
  out.image = GrayImage(width, height);
  for (std::size_t i = 0; i < canvas.size(); ++i) {
    double v = canvas[i] * spec.illumination_gain;
    if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
    out.image.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

}  // namespace textvpr::synth
