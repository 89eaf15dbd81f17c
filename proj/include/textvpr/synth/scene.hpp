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
#include <optional>
#include <string>
#include <vector>

#include "textvpr/core/types.hpp"
#include "textvpr/geometry/polygon.hpp"

namespace textvpr::synth {

inline constexpr std::size_t kMaxWordLength = 25;

inline constexpr std::uint8_t kBackground = 40;
inline constexpr std::uint8_t kInk = 215;
inline constexpr std::uint8_t kOccluder = 128;

struct WordSpec {
  std::string text;
  geometry::Point anchor;  // center of the word box, pixels
  double scale = 14.0;     // glyph height in pixels (one dot row = scale / 7)
  double rotation = 0.0;   // radians, about the anchor
  double occlusion_fraction = 0.0;
};

struct SceneSpec {
  std::size_t width = 128;
  std::size_t height = 128;
  std::vector<WordSpec> words;
  double illumination_gain = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct RenderedFrame {
  GrayImage image;
  std::vector<TextInstance> truth;
};

// Throws ContractError for invalid specs (empty canvas, bad words, fractions).
void validate(const SceneSpec& spec);

// Unrotated, unclipped word box width and height in pixels.
double word_width(std::size_t length, double scale);

// Word box corners in image coordinates: top-left, top-right, bottom-right,
// bottom-left of the unrotated word, rotated about the anchor.
std::vector<geometry::Point> word_quad(const WordSpec& word);

// Renders the scene. Truth polygons are the word quads clipped to the canvas
// and canonicalized; words clipped away entirely produce no instance.
RenderedFrame render_frame(const SceneSpec& spec);

struct TraversalConfig {
  std::size_t n_places = 16;
  std::size_t words_per_place = 2;
  double query_perturbation = 1.0;
  double drop_rate = 0.0;
  double noise_sigma = 2.0;
  std::size_t canvas = 128;
  std::size_t min_word_length = 3;
  std::size_t max_word_length = 8;
  double min_scale = 12.0;
  double max_scale = 16.0;
};

struct TraversalPair {
  std::vector<Frame> map_frames;
  std::vector<Frame> query_frames;
  // Ground-truth map index per query, or nullopt for distractor places.
  std::vector<std::optional<std::size_t>> correspondence;
  std::vector<SceneSpec> map_specs;
  std::vector<SceneSpec> query_specs;
};

void validate(const TraversalConfig& config);

TraversalPair generate_traversal(const TraversalConfig& config, std::uint64_t seed);

}  // namespace textvpr::synth
