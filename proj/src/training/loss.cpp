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

#include "textvpr/training/loss.hpp"

#include <algorithm>
#include <cmath>

#include "textvpr/core/error.hpp"
#include "textvpr/core/ops.hpp"

namespace textvpr::training {

using spotter::HeadOutputs;
using spotter::QueryPrediction;
using spotter::SpotterConfig;

TrainTarget make_target(const TextInstance& truth, std::size_t frame_width, std::size_t frame_height,
                        const SpotterConfig& config) {
  if (frame_width == 0 || frame_height == 0) throw ContractError("make_target: empty frame");
  const auto& poly = truth.polygon;
  geometry::Polygon norm =
      poly.normalized() ? poly
                        : geometry::scaled(poly, 1.0 / static_cast<double>(frame_width),
                                           1.0 / static_cast<double>(frame_height), true);
  const auto resampled = geometry::resample_polygon(norm, config.n_polygon_points);
  TrainTarget t;
  for (const auto& p : resampled.vertices()) {
    t.polygon.push_back(std::clamp(p.x, 0.0, 1.0));
    t.polygon.push_back(std::clamp(p.y, 0.0, 1.0));
  }
  std::string text = normalize_transcription(truth.text);
  if (text.size() > config.max_word_len) text.resize(config.max_word_len);
  t.length = text.size();
  t.chars.assign(config.max_word_len, config.end_of_word_class());
  for (std::size_t i = 0; i < text.size(); ++i) t.chars[i] = static_cast<std::size_t>(charset_index(text[i]));
  return t;
}

namespace {

// -log softmax(row)[target]
double row_cross_entropy(const double* row, std::size_t n, std::size_t target) {
  double m = row[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, row[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(row[i] - m);
  return m + std::log(s) - row[target];
}

}  // namespace

double match_cost(const QueryPrediction& pred, const TrainTarget& truth, const LossWeights& weights,
                  const SpotterConfig& config) {
  if (pred.polygon.size() != truth.polygon.size()) throw DimensionError("match_cost: polygon size mismatch");
  const double cls = 1.0 - pred.text_probability();
  double l1 = 0.0;
  for (std::size_t i = 0; i < truth.polygon.size(); ++i) l1 += std::abs(pred.polygon[i] - truth.polygon[i]);
  l1 /= static_cast<double>(truth.polygon.size());
  double ce = 0.0;
  const std::size_t c = config.n_char_classes();
  for (std::size_t i = 0; i < truth.length; ++i) ce += row_cross_entropy(&pred.char_logits[i * c], c, truth.chars[i]);
  if (truth.length > 0) ce /= static_cast<double>(truth.length);
  return weights.cls * cls + weights.poly * l1 + weights.chr * ce;
}

CostMatrix cost_matrix(const std::vector<QueryPrediction>& preds, const std::vector<TrainTarget>& truths,
                       const LossWeights& weights, const SpotterConfig& config) {
  CostMatrix m(preds.size(), truths.size());
  for (std::size_t q = 0; q < preds.size(); ++q)
    for (std::size_t t = 0; t < truths.size(); ++t) m.at(q, t) = match_cost(preds[q], truths[t], weights, config);
  return m;
}

template <typename T>
LossTerms<T> spotting_loss(const HeadOutputs<T>& heads, const std::vector<TrainTarget>& truths,
                           const MatchAssignment& assignment, const LossWeights& weights,
                           const SpotterConfig& config) {
  const std::size_t nq = heads.class_logits.dim(0);
  const std::size_t k2 = 2 * config.n_polygon_points;
  const std::size_t len = config.max_word_len;
  const std::size_t nc = config.n_char_classes();
  const T inv_q = T(1) / static_cast<T>(nq);

  // Work in query order so the result does not depend on the truth order.
  auto pairs = assignment.pairs;
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [q, t] : pairs)
    if (q >= nq || t >= truths.size()) throw ContractError("spotting_loss: assignment out of range");

  std::vector<std::size_t> cls_target(nq, 1);
  for (const auto& [q, t] : pairs) cls_target[q] = 0;
  std::vector<T> cls_w(nq, inv_q);
  LossTerms<T> out;
  Tensor<T> cls = cross_entropy(heads.class_logits, std::span<const std::size_t>(cls_target),
                                std::span<const T>(cls_w));
  out.cls = static_cast<double>(cls.item());
  out.total = cls;
  if (pairs.empty()) return out;

  std::vector<std::size_t> rows;
  std::vector<T> poly_target;
  std::vector<std::size_t> char_target;
  for (const auto& [q, t] : pairs) {
    rows.push_back(q);
    for (double v : truths[t].polygon) poly_target.push_back(static_cast<T>(v));
    char_target.insert(char_target.end(), truths[t].chars.begin(), truths[t].chars.end());
  }
  const std::size_t m = rows.size();

  Tensor<T> poly_pred = gather_rows(heads.polygons, std::span<const std::size_t>(rows));
  Tensor<T> target = Tensor<T>::from({m, k2}, poly_target);
  Tensor<T> poly = scale(sum(abs(sub(poly_pred, target))),
                         static_cast<T>(weights.poly) / static_cast<T>(k2) * inv_q);

  Tensor<T> char_pred = reshape(gather_rows(heads.char_logits, std::span<const std::size_t>(rows)), {m * len, nc});
  std::vector<T> char_w(m * len, static_cast<T>(weights.chr) / static_cast<T>(len) * inv_q);
  Tensor<T> chr = cross_entropy(char_pred, std::span<const std::size_t>(char_target), std::span<const T>(char_w));

  out.poly = static_cast<double>(poly.item());
  out.chr = static_cast<double>(chr.item());
  out.total = add(add(cls, poly), chr);
  return out;
}

template <typename T>
LossTerms<T> matched_loss(const HeadOutputs<T>& heads, const std::vector<TrainTarget>& truths,
                          const LossWeights& weights, const SpotterConfig& config, MatchAssignment* assignment_out) {
  const auto preds = spotter::to_predictions(heads, config);
  const auto assignment = hungarian_match(cost_matrix(preds, truths, weights, config));
  if (assignment_out != nullptr) *assignment_out = assignment;
  return spotting_loss(heads, truths, assignment, weights, config);
}

template LossTerms<float> spotting_loss(const HeadOutputs<float>&, const std::vector<TrainTarget>&,
                                        const MatchAssignment&, const LossWeights&, const SpotterConfig&);
template LossTerms<double> spotting_loss(const HeadOutputs<double>&, const std::vector<TrainTarget>&,
                                         const MatchAssignment&, const LossWeights&, const SpotterConfig&);
template LossTerms<float> matched_loss(const HeadOutputs<float>&, const std::vector<TrainTarget>&,
                                       const LossWeights&, const SpotterConfig&, MatchAssignment*);
template LossTerms<double> matched_loss(const HeadOutputs<double>&, const std::vector<TrainTarget>&,
                                        const LossWeights&, const SpotterConfig&, MatchAssignment*);

}  // namespace textvpr::training
