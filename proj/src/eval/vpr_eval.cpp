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

#include "textvpr/eval/vpr_eval.hpp"

#include <algorithm>
#include <cmath>

#include "textvpr/core/error.hpp"

namespace textvpr::eval {

double interpolated_precision(const std::vector<PRPoint>& points, double recall) {
  double best = 0.0;
  for (const auto& p : points)
    if (p.recall >= recall) best = std::max(best, p.precision);
  return best;
}

PRCurve eval_vpr(const std::vector<vpr::MatchResult>& results, const std::vector<std::optional<std::size_t>>& truth,
                 std::size_t frame_tolerance) {
  if (results.size() != truth.size()) throw DimensionError("eval_vpr: result and truth counts differ");
  PRCurve curve;
  curve.frame_tolerance = frame_tolerance;
  curve.n_queries = results.size();
  std::vector<bool> correct(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!std::isfinite(r.score) || !r.best_index)
      throw ContractError("eval_vpr: query '" + r.query_id + "' has no score or proposed frame");
    if (truth[i]) {
      ++curve.n_with_truth;
      const std::size_t a = *r.best_index, b = *truth[i];
      correct[i] = (a > b ? a - b : b - a) <= frame_tolerance;
    }
  }

  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return results[a].score > results[b].score; });
  std::size_t accepted = 0, hits = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = results[order[k]].score;
    while (k < order.size() && results[order[k]].score == t) {
      ++accepted;
      hits += correct[order[k]] ? 1 : 0;
      ++k;
    }
    PRPoint p;
    p.threshold = t;
    p.accepted = accepted;
    p.correct = hits;
    p.precision = static_cast<double>(hits) / static_cast<double>(accepted);
    p.recall = curve.n_with_truth > 0 ? static_cast<double>(hits) / static_cast<double>(curve.n_with_truth) : 0.0;
    curve.points.push_back(p);
  }
  for (std::size_t i = 0; i < kRecallLevels.size(); ++i)
    curve.precision_at_recall[i] = interpolated_precision(curve.points, kRecallLevels[i]);
  return curve;
}

}  // namespace textvpr::eval
