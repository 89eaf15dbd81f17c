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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textvpr/core/types.hpp"

namespace textvpr::vpr {

struct FilterPolicy {
  double min_confidence = 0.7;
  std::size_t min_length = 3;
  double min_alnum_fraction = 1.0;

  // Throws ContractError for thresholds outside [0,1].
  void validate() const;

  friend bool operator==(const FilterPolicy&, const FilterPolicy&) = default;
};

// Keeps instances passing all three predicates; order preserved. Length and
// the alphanumeric fraction are measured on the raw transcription.
std::vector<TextInstance> filter_instances(const std::vector<TextInstance>& instances, const FilterPolicy& policy);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein / max length on case-folded strings; 1 when both empty.
double edit_similarity(std::string_view a, std::string_view b);

inline constexpr double kDefaultSimFloor = 0.6;

// Paired-similarity sum before normalization, as an exact fraction
// numerator / denominator.
struct PairedSum {
  double numerator = 0.0;
  double denominator = 1.0;
  double value() const { return numerator / denominator; }
};

PairedSum paired_similarity(const std::vector<std::string>& q, const std::vector<std::string>& r,
                            double sim_floor = kDefaultSimFloor);

// Optimal one-to-one word pairing score normalized by the larger set size;
// 0 when either side is empty.
double frame_similarity(const std::vector<TextInstance>& q, const std::vector<TextInstance>& r,
                        double sim_floor = kDefaultSimFloor);
double frame_similarity(const std::vector<std::string>& q, const std::vector<std::string>& r,
                        double sim_floor = kDefaultSimFloor);

struct PlaceFrame {
  std::string frame_id;
  std::vector<TextInstance> instances;

  friend bool operator==(const PlaceFrame&, const PlaceFrame&) = default;
};

struct PlaceMap {
  FilterPolicy policy;
  std::vector<PlaceFrame> frames;

  friend bool operator==(const PlaceMap&, const PlaceMap&) = default;
};

// Throws ValidationError on duplicate frame ids.
PlaceMap build_place_map(const std::vector<Frame>& frames, const FilterPolicy& policy);
PlaceMap build_place_map(const std::vector<PlaceFrame>& frames, const FilterPolicy& policy);

struct MatchResult {
  std::string query_id;
  std::optional<std::string> best_frame_id;
  std::optional<std::size_t> best_index;
  double score = 0.0;
  bool accepted = false;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// Filters the query with the map's policy, scores every map frame and keeps
// the maximum (smallest index on ties). Throws ContractError for an empty map.
MatchResult query_place(const PlaceMap& map, const std::string& query_id, const std::vector<TextInstance>& query,
                        double decision_threshold, double sim_floor = kDefaultSimFloor);

}  // namespace textvpr::vpr
