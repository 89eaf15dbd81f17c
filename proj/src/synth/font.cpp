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

#include "textvpr/synth/font.hpp"

#include <array>
#include <cmath>
#include <string>

#include <string_view>

#include "textvpr/core/error.hpp"
#include "textvpr/core/types.hpp"

namespace textvpr {

int charset_index(char c) {
  const auto pos = kCharset.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

std::string case_fold(std::string_view s) {
  std::string out(s);
  for (auto& ch : out)
    if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
  return out;
}

std::string normalize_transcription(std::string_view s) {
  std::string out;
  for (char ch : case_fold(s))
    if (charset_index(ch) >= 0) out.push_back(ch);
  return out;
}

}  // namespace textvpr

namespace textvpr::synth {

namespace {

using Glyph = std::array<std::uint8_t, kGlyphRows>;

constexpr Glyph row_bits(std::array<std::string_view, kGlyphRows> rows) {
  Glyph g{};
  for (std::size_t r = 0; r < kGlyphRows; ++r) {
    std::uint8_t v = 0;
    for (std::size_t c = 0; c < kGlyphCols; ++c) v = static_cast<std::uint8_t>((v << 1) | (rows[r][c] == '#'));
    g[r] = v;
  }
  return g;
}

// clang-format off
constexpr std::array<Glyph, 36> kFont = {{
  row_bits({".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}),  // A
  row_bits({"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}),  // B
  row_bits({".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."}),  // C
  row_bits({"####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."}),  // D
  row_bits({"#####", "#....", "#....", "####.", "#....", "#....", "#####"}),  // E
  row_bits({"#####", "#....", "#....", "####.", "#....", "#....", "#...."}),  // F
  row_bits({".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"}),  // G
  row_bits({"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}),  // H
  row_bits({"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"}),  // I
  row_bits({"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}),  // J
  row_bits({"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}),  // K
  row_bits({"#....", "#....", "#....", "#....", "#....", "#....", "#####"}),  // L
  row_bits({"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}),  // M
  row_bits({"#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"}),  // N
  row_bits({".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}),  // O
  row_bits({"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}),  // P
  row_bits({".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}),  // Q
  row_bits({"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}),  // R
  row_bits({".####", "#....", "#....", ".###.", "....#", "....#", "####."}),  // S
  row_bits({"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}),  // T
  row_bits({"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}),  // U
  row_bits({"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}),  // V
  row_bits({"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."}),  // W
  row_bits({"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}),  // X
  row_bits({"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}),  // Y
  row_bits({"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}),  // Z
  row_bits({".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}),  // 0
  row_bits({"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}),  // 1
  row_bits({".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}),  // 2
  row_bits({"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}),  // 3
  row_bits({"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}),  // 4
  row_bits({"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}),  // 5
  row_bits({"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}),  // 6
  row_bits({"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}),  // 7
  row_bits({".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}),  // 8
  row_bits({".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}),  // 9
}};
// clang-format on

}  // namespace

const std::uint8_t* glyph_rows(char c) {
  const int idx = charset_index(c);
  if (idx < 0) throw ContractError(std::string("glyph: character '") + c + "' is outside the charset");
  return kFont[static_cast<std::size_t>(idx)].data();
}

bool glyph_dot(char c, std::size_t col, std::size_t row) {
  const std::uint8_t* rows = glyph_rows(c);
  return ((rows[row] >> (kGlyphCols - 1 - col)) & 1U) != 0;
}

Bitmap glyph_raster(char c, std::size_t scale) {
  if (scale == 0) throw ContractError("glyph_raster: scale must be positive");
  const std::uint8_t* rows = glyph_rows(c);
  Bitmap bm;
  bm.height = scale;
  bm.width = static_cast<std::size_t>(std::lround(static_cast<double>(kGlyphCols * scale) / kGlyphRows));
  if (bm.width == 0) bm.width = 1;
  bm.bits.assign(bm.width * bm.height, 0);
  for (std::size_t y = 0; y < bm.height; ++y) {
    const std::size_t r = y * kGlyphRows / bm.height;
    for (std::size_t x = 0; x < bm.width; ++x) {
      const std::size_t col = x * kGlyphCols / bm.width;
      bm.bits[y * bm.width + x] = (rows[r] >> (kGlyphCols - 1 - col)) & 1U;
    }
  }
  return bm;
}

}  // namespace textvpr::synth
