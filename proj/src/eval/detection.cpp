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

#include "textvpr/eval/detection.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "textvpr/core/error.hpp"
#include "textvpr/training/hungarian.hpp"

namespace textvpr::eval {

double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

DetectionReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  DetectionReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.hmean = harmonic_mean(r.precision, r.recall);
  return r;
}

namespace {

bool usable(const TextInstance& inst) {
  return !inst.polygon.empty() && geometry::is_simple(inst.polygon);
}

struct FrameMatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (pred, truth)
  std::size_t invalid_preds = 0;
  std::size_t invalid_truths = 0;
};

FrameMatch match_frame(const std::vector<TextInstance>& preds, const std::vector<TextInstance>& truths,
                       const DetectionOptions& opt) {
  if (!(opt.iou_threshold > 0.0 && opt.iou_threshold <= 1.0)) throw ContractError("iou_threshold must be in (0,1]");
  FrameMatch out;
  std::vector<bool> pv(preds.size()), tv(truths.size());
  for (std::size_t i = 0; i < preds.size(); ++i) out.invalid_preds += (pv[i] = usable(preds[i])) ? 0 : 1;
  for (std::size_t j = 0; j < truths.size(); ++j) out.invalid_truths += (tv[j] = usable(truths[j])) ? 0 : 1;

  // IoU, or nullopt below threshold / for unusable instances.
  std::vector<std::optional<double>> iou(preds.size() * truths.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pv[i]) continue;
    for (std::size_t j = 0; j < truths.size(); ++j) {
      if (!tv[j]) continue;
      if (preds[i].polygon.normalized() != truths[j].polygon.normalized())
        throw ContractError("eval_detection: predictions and truths use different coordinate spaces");
      const double v = geometry::polygon_iou(preds[i].polygon, truths[j].polygon);
      if (v >= opt.iou_threshold) iou[i * truths.size() + j] = v;
    }
  }

  if (opt.optimal) {
    // Maximizes the summed IoU over eligible pairs.
    const std::size_t n = std::max(preds.size(), truths.size());
    if (n == 0) return out;
    training::CostMatrix cost(n, n, 1.0);
    for (std::size_t i = 0; i < preds.size(); ++i)
      for (std::size_t j = 0; j < truths.size(); ++j)
        if (iou[i * truths.size() + j]) cost.at(i, j) = 1.0 - *iou[i * truths.size() + j];
    const auto m = training::hungarian_match(cost);
    for (const auto& [i, j] : m.pairs)
      if (i < preds.size() && j < truths.size() && iou[i * truths.size() + j]) out.pairs.emplace_back(i, j);
    return out;
  }

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].confidence > preds[b].confidence; });
  std::vector<bool> taken(truths.size(), false);
  for (std::size_t i : order) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < truths.size(); ++j) {
      const auto& v = iou[i * truths.size() + j];
      if (taken[j] || !v) continue;
      if (!best || *v > *iou[i * truths.size() + *best]) best = j;
    }
    if (best) {
      taken[*best] = true;
      out.pairs.emplace_back(i, *best);
    }
  }
  return out;
}

DetectionReport accumulate(const std::vector<std::vector<TextInstance>>& preds,
                           const std::vector<std::vector<TextInstance>>& truths, const DetectionOptions& opt,
                           bool check_text) {
  if (preds.size() != truths.size()) throw DimensionError("evaluation: prediction and truth frame counts differ");
  std::size_t tp = 0, np = 0, nt = 0, inv_p = 0, inv_t = 0;
  for (std::size_t f = 0; f < preds.size(); ++f) {
    const auto m = match_frame(preds[f], truths[f], opt);
    np += preds[f].size();
    nt += truths[f].size();
    inv_p += m.invalid_preds;
    inv_t += m.invalid_truths;
    for (const auto& [i, j] : m.pairs) {
      if (check_text &&
          normalize_transcription(preds[f][i].text) != normalize_transcription(truths[f][j].text))
        continue;
      ++tp;
    }
  }
  auto r = report_from_counts(tp, np - tp, nt - tp);
  r.invalid_predictions = inv_p;
  r.invalid_truths = inv_t;
  return r;
}

}  // namespace

DetectionReport eval_detection(const std::vector<TextInstance>& preds, const std::vector<TextInstance>& truths,
                               const DetectionOptions& options) {
  return accumulate({preds}, {truths}, options, false);
}

DetectionReport eval_detection(const std::vector<std::vector<TextInstance>>& preds,
                               const std::vector<std::vector<TextInstance>>& truths, const DetectionOptions& options) {
  return accumulate(preds, truths, options, false);
}

DetectionReport eval_end2end_report(const std::vector<std::vector<TextInstance>>& preds,
                                    const std::vector<std::vector<TextInstance>>& truths,
                                    const DetectionOptions& options) {
  return accumulate(preds, truths, options, true);
}

double eval_end2end(const std::vector<TextInstance>& preds, const std::vector<TextInstance>& truths,
                    const DetectionOptions& options) {
  return accumulate({preds}, {truths}, options, true).hmean;
}

double eval_end2end(const std::vector<std::vector<TextInstance>>& preds,
                    const std::vector<std::vector<TextInstance>>& truths, const DetectionOptions& options) {
  return accumulate(preds, truths, options, true).hmean;
}

}  // namespace textvpr::eval
