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
#include <vector>

#include "textvpr/core/tensor.hpp"
#include "textvpr/core/types.hpp"
#include "textvpr/spotter/config.hpp"
#include "textvpr/spotter/model.hpp"
#include "textvpr/spotter/spot.hpp"
#include "textvpr/training/hungarian.hpp"

namespace textvpr::training {

struct LossWeights {
  double cls = 2.0;
  double poly = 5.0;
  double chr = 1.0;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

// A ground-truth word prepared for supervision.
struct TrainTarget {
  std::vector<double> polygon;     // 2 * n_polygon_points, normalized
  std::vector<std::size_t> chars;  // max_word_len class ids, padded with end-of-word
  std::size_t length = 0;          // number of real characters
};

// Normalizes by the frame size, resamples to n_polygon_points and encodes the
// case-folded transcription (symbols outside the charset are dropped, long
// words truncated).
TrainTarget make_target(const TextInstance& truth, std::size_t frame_width, std::size_t frame_height,
                        const spotter::SpotterConfig& config);

double match_cost(const spotter::QueryPrediction& pred, const TrainTarget& truth, const LossWeights& weights,
                  const spotter::SpotterConfig& config);

// [n_queries x n_truth].
CostMatrix cost_matrix(const std::vector<spotter::QueryPrediction>& preds, const std::vector<TrainTarget>& truths,
                       const LossWeights& weights, const spotter::SpotterConfig& config);

template <typename T>
struct LossTerms {
  Tensor<T> total;  // [1]
  // Contributions to total (already weighted and averaged over queries).
  double cls = 0.0;
  double poly = 0.0;
  double chr = 0.0;
};

// Matched queries: text cross-entropy + poly weight * mean L1 + char weight *
// mean per-position cross-entropy (end-of-word padding included). Unmatched
// queries: no-text cross-entropy. Averaged over all queries.
template <typename T>
LossTerms<T> spotting_loss(const spotter::HeadOutputs<T>& heads, const std::vector<TrainTarget>& truths,
                           const MatchAssignment& assignment, const LossWeights& weights,
                           const spotter::SpotterConfig& config);

// Match then score, the usual training composition.
template <typename T>
LossTerms<T> matched_loss(const spotter::HeadOutputs<T>& heads, const std::vector<TrainTarget>& truths,
                          const LossWeights& weights, const spotter::SpotterConfig& config,
                          MatchAssignment* assignment_out = nullptr);

}  // namespace textvpr::training
