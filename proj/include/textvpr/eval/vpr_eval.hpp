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

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "textvpr/vpr/vpr.hpp"

namespace textvpr::eval {

inline constexpr std::array<double, 5> kRecallLevels = {0.2, 0.4, 0.6, 0.8, 0.9};

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t accepted = 0;
  std::size_t correct = 0;

  friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

struct PRCurve {
  std::vector<PRPoint> points;  // descending threshold
  std::array<double, 5> precision_at_recall{};
  std::size_t frame_tolerance = 3;
  std::size_t n_queries = 0;
  std::size_t n_with_truth = 0;

  friend bool operator==(const PRCurve&, const PRCurve&) = default;
};

// Highest precision among points with recall >= r; 0 when none reach it.
double interpolated_precision(const std::vector<PRPoint>& points, double recall);

// Sweeps the acceptance threshold over every observed score. A query counts
// as correct when its proposed index lies within `frame_tolerance` of its
// true index; queries without a true index are never correct. Throws
// ContractError for a result lacking a finite score or a proposed index.
PRCurve eval_vpr(const std::vector<vpr::MatchResult>& results,
                 const std::vector<std::optional<std::size_t>>& truth, std::size_t frame_tolerance = 3);

}  // namespace textvpr::eval
