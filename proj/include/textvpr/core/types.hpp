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
#include <string>
#include <vector>

#include "textvpr/geometry/polygon.hpp"

namespace textvpr {

// 8-bit single-channel image, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {}

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// One word region: detected or ground truth.
struct TextInstance {
  geometry::Polygon polygon;
  std::string text;
  double confidence = 1.0;

  friend bool operator==(const TextInstance&, const TextInstance&) = default;
};

struct Frame {
  std::string id;
  GrayImage image;
  std::vector<TextInstance> instances;
};

// The 36 recognizable symbols, in class-index order.
inline constexpr std::string_view kCharset = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

// Class index of an (already case-folded) symbol, or -1.
int charset_index(char c);

// Upper-cases ASCII letters; everything else is left alone.
std::string case_fold(std::string_view s);

// Case-folds and drops symbols outside the charset.
std::string normalize_transcription(std::string_view s);

}  // namespace textvpr
