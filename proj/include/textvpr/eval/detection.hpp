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

#include "textvpr/core/types.hpp"

namespace textvpr::eval {

struct DetectionReport {
  double precision = 0.0;
  double recall = 0.0;
  double hmean = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Instances skipped from matching because their polygon is not simple.
  std::size_t invalid_predictions = 0;
  std::size_t invalid_truths = 0;
};

// 2PR/(P+R), 0 when both are 0.
double harmonic_mean(double p, double r);

// P = tp/(tp+fp), R = tp/(tp+fn); empty denominators give 0.
DetectionReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct DetectionOptions {
  double iou_threshold = 0.5;
  // Bipartite matching maximizing summed IoU instead of the greedy protocol.
  bool optimal = false;
};

// Greedy by descending confidence (input order breaks ties); each prediction
// takes the unmatched truth with the highest IoU at or above the threshold.
DetectionReport eval_detection(const std::vector<TextInstance>& preds, const std::vector<TextInstance>& truths,
                               const DetectionOptions& options = {});

// Counts summed over frames.
DetectionReport eval_detection(const std::vector<std::vector<TextInstance>>& preds,
                               const std::vector<std::vector<TextInstance>>& truths,
                               const DetectionOptions& options = {});

// Detection matching, after which a matched pair only counts as a true
// positive when the normalized transcriptions agree. The returned report's
// hmean is the end-to-end F-measure.
DetectionReport eval_end2end_report(const std::vector<std::vector<TextInstance>>& preds,
                                    const std::vector<std::vector<TextInstance>>& truths,
                                    const DetectionOptions& options = {});

double eval_end2end(const std::vector<TextInstance>& preds, const std::vector<TextInstance>& truths,
                    const DetectionOptions& options = {});
double eval_end2end(const std::vector<std::vector<TextInstance>>& preds,
                    const std::vector<std::vector<TextInstance>>& truths, const DetectionOptions& options = {});

}  // namespace textvpr::eval
