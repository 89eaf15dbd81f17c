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
#include <string>
#include <vector>

#include "textvpr/core/types.hpp"
#include "textvpr/spotter/model.hpp"

namespace textvpr::spotter {

// One query's raw outputs in double precision.
struct QueryPrediction {
  double text_logit = 0.0;     // class 0
  double no_text_logit = 0.0;  // class 1
  std::vector<double> polygon;      // 2 * n_polygon_points, in [0,1]
  std::vector<double> char_logits;  // max_word_len * n_char_classes

  // Probability of the text class, computed stably.
  double text_probability() const;
  // log of text_probability(); strictly negative for finite logits.
  double log_text_probability() const;
};

template <typename T>
std::vector<QueryPrediction> to_predictions(const HeadOutputs<T>& heads, const SpotterConfig& config);

// Greedy per-position decode up to the first end-of-word class. `confidence`
// receives text probability times the mean max-class probability over the
// emitted positions (the end-of-word probability at position 0 when nothing
// is emitted).
std::string decode_transcription(const QueryPrediction& pred, const SpotterConfig& config, double* confidence);

struct Letterbox {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;
};

// Resizes (bilinear) into a square canvas of `size`, preserving aspect
// ratio and centring; the border is filled with `fill`.
GrayImage letterbox(const GrayImage& image, std::size_t size, std::uint8_t fill, Letterbox* transform);

struct SpotOptions {
  double score_threshold = 0.5;
  // Letterbox frames whose size differs from the model's; otherwise reject.
  bool resize = false;
};

// patchify -> encode (no masking) -> adapt -> decode -> heads. Keeps queries
// whose text probability is >= the threshold; polygons are returned in the
// input image's pixel space.
template <typename T>
std::vector<TextInstance> spot(const GrayImage& image, const SpotterModel<T>& model, const SpotOptions& options);

}  // namespace textvpr::spotter
