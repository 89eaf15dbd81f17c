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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace textvpr::synth {

inline constexpr std::size_t kGlyphCols = 5;
inline constexpr std::size_t kGlyphRows = 7;

struct Bitmap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1, row-major

  bool at(std::size_t x, std::size_t y) const { return bits[y * width + x] != 0; }
  friend bool operator==(const Bitmap&, const Bitmap&) = default;
};

// Raw 5x7 dot pattern of a charset symbol; bit 4 of each row is the leftmost
// column. Throws ContractError for symbols outside the charset.
const std::uint8_t* glyph_rows(char c);

// Whether dot (col, row) of the glyph is inked.
bool glyph_dot(char c, std::size_t col, std::size_t row);

// Rasterizes a glyph to `scale` pixels tall and round(5 * scale / 7) wide by
// nearest-neighbour sampling of the dot grid. scale 7 reproduces the table.
Bitmap glyph_raster(char c, std::size_t scale);

}  // namespace textvpr::synth
