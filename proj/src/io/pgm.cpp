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

#include "textvpr/io/pgm.hpp"

#include <cctype>

#include "textvpr/core/error.hpp"
#include "textvpr/io/atomic_file.hpp"

namespace textvpr::io {

namespace {

constexpr std::size_t kMaxSide = 1 << 16;

using Unit = ParseError::Unit;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

// Skips whitespace and comments, then reads a decimal token.
std::size_t read_number(std::string_view s, std::size_t& pos, const char* what) {
  for (;;) {
    while (pos < s.size() && is_space(s[pos])) ++pos;
    if (pos < s.size() && s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= s.size()) throw ParseError(std::string("pgm: header ends before ") + what, pos, Unit::Byte);
  if (!std::isdigit(static_cast<unsigned char>(s[pos])))
    throw ParseError(std::string("pgm: expected ") + what, pos, Unit::Byte);
  std::size_t v = 0;
  const std::size_t start = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    v = v * 10 + static_cast<std::size_t>(s[pos] - '0');
    if (v > kMaxSide * kMaxSide) throw ParseError(std::string("pgm: ") + what + " too large", start, Unit::Byte);
    ++pos;
  }
  return v;
}

}  // namespace

GrayImage parse_pgm(std::string_view s) {
  if (s.size() < 2 || s[0] != 'P' || s[1] != '5') throw ParseError("pgm: missing P5 magic", 0, Unit::Byte);
  std::size_t pos = 2;
  if (pos < s.size() && !is_space(s[pos]) && s[pos] != '#') throw ParseError("pgm: missing P5 magic", 0, Unit::Byte);
  const std::size_t w = read_number(s, pos, "width");
  const std::size_t h = read_number(s, pos, "height");
  const std::size_t start_max = pos;
  const std::size_t maxval = read_number(s, pos, "maxval");
  if (w == 0 || h == 0 || w > kMaxSide || h > kMaxSide) throw ParseError("pgm: unsupported dimensions", start_max, Unit::Byte);
  if (maxval != 255) throw ParseError("pgm: only maxval 255 is supported", start_max, Unit::Byte);
  if (pos >= s.size() || !is_space(s[pos])) throw ParseError("pgm: expected whitespace after maxval", pos, Unit::Byte);
  ++pos;
  const std::size_t need = w * h;
  if (s.size() - pos < need)
    throw ParseError("pgm: truncated payload, expected " + std::to_string(need) + " bytes", s.size(), Unit::Byte);
  GrayImage img(w, h);
  for (std::size_t i = 0; i < need; ++i) img.pixels[i] = static_cast<std::uint8_t>(s[pos + i]);
  return img;
}

std::string format_pgm(const GrayImage& image) {
  if (image.width == 0 || image.height == 0 || image.pixels.size() != image.width * image.height)
    throw ContractError("pgm: malformed image");
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

GrayImage read_pgm(const std::string& path) { return parse_pgm(read_file(path)); }

void write_pgm(const GrayImage& image, const std::string& path) { write_file_atomic(path, format_pgm(image)); }

}  // namespace textvpr::io
