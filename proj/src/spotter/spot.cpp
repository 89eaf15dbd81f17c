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

#include "textvpr/spotter/spot.hpp"

#include <algorithm>
#include <cmath>

#include "textvpr/core/error.hpp"

namespace textvpr::spotter {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double QueryPrediction::log_text_probability() const { return -softplus(no_text_logit - text_logit); }

double QueryPrediction::text_probability() const { return std::exp(log_text_probability()); }

template <typename T>
std::vector<QueryPrediction> to_predictions(const HeadOutputs<T>& heads, const SpotterConfig& config) {
  const std::size_t Q = heads.class_logits.dim(0);
  const std::size_t np2 = 2 * config.n_polygon_points;
  const std::size_t nc = config.max_word_len * config.n_char_classes();
  auto cls = heads.class_logits.data();
  auto poly = heads.polygons.data();
  auto chars = heads.char_logits.data();
  std::vector<QueryPrediction> out(Q);
  for (std::size_t q = 0; q < Q; ++q) {
    out[q].text_logit = cls[2 * q];
    out[q].no_text_logit = cls[2 * q + 1];
    out[q].polygon.assign(poly.begin() + static_cast<std::ptrdiff_t>(q * np2),
                          poly.begin() + static_cast<std::ptrdiff_t>((q + 1) * np2));
    out[q].char_logits.assign(chars.begin() + static_cast<std::ptrdiff_t>(q * nc),
                              chars.begin() + static_cast<std::ptrdiff_t>((q + 1) * nc));
  }
  return out;
}

std::string decode_transcription(const QueryPrediction& pred, const SpotterConfig& config, double* confidence) {
  const std::size_t C = config.n_char_classes();
  const std::size_t eow = config.end_of_word_class();
  std::string text;
  double prob_sum = 0.0;
  double eow_first = 0.0;
  for (std::size_t pos = 0; pos < config.max_word_len; ++pos) {
    const double* row = pred.char_logits.data() + pos * C;
    const std::size_t best = static_cast<std::size_t>(std::max_element(row, row + C) - row);
    double z = 0.0;
    for (std::size_t c = 0; c < C; ++c) z += std::exp(row[c] - row[best]);
    const double p_best = 1.0 / z;
    if (best == eow) {
      if (pos == 0) eow_first = p_best;
      break;
    }
    text.push_back(kCharset[best]);
    prob_sum += p_best;
  }
  if (confidence != nullptr) {
    const double seq = text.empty() ? eow_first : prob_sum / static_cast<double>(text.size());
    *confidence = pred.text_probability() * seq;
  }
  return text;
}

GrayImage letterbox(const GrayImage& image, std::size_t size, std::uint8_t fill, Letterbox* transform) {
  if (image.width == 0 || image.height == 0) throw ContractError("letterbox: empty image");
  const double s = static_cast<double>(size) / static_cast<double>(std::max(image.width, image.height));
  const double new_w = static_cast<double>(image.width) * s, new_h = static_cast<double>(image.height) * s;
  Letterbox t{s, (static_cast<double>(size) - new_w) / 2.0, (static_cast<double>(size) - new_h) / 2.0};
  GrayImage out(size, size, fill);
  for (std::size_t y = 0; y < size; ++y)
    for (std::size_t x = 0; x < size; ++x) {
      const double sx = (static_cast<double>(x) + 0.5 - t.offset_x) / s - 0.5;
      const double sy = (static_cast<double>(y) + 0.5 - t.offset_y) / s - 0.5;
      if (sx < -0.5 || sy < -0.5 || sx > static_cast<double>(image.width) - 0.5 ||
          sy > static_cast<double>(image.height) - 0.5)
        continue;
      const auto clampi = [](double v, std::size_t n) {
        return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
      };
      const double fx = std::floor(sx), fy = std::floor(sy);
      const std::size_t x0 = clampi(fx, image.width), x1 = clampi(fx + 1, image.width);
      const std::size_t y0 = clampi(fy, image.height), y1 = clampi(fy + 1, image.height);
      const double ax = sx - fx, ay = sy - fy;
      const double v = (1 - ay) * ((1 - ax) * image.at(x0, y0) + ax * image.at(x1, y0)) +
                       ay * ((1 - ax) * image.at(x0, y1) + ax * image.at(x1, y1));
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  if (transform != nullptr) *transform = t;
  return out;
}

template <typename T>
std::vector<TextInstance> spot(const GrayImage& image, const SpotterModel<T>& model, const SpotOptions& options) {
  const auto& cfg = model.config();
  const std::size_t S = cfg.image_size;
  Letterbox tr;
  const GrayImage* input = &image;
  GrayImage resized;
  if (image.width != S || image.height != S) {
    if (!options.resize)
      throw ContractError("spot: image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                          " but the model expects " + std::to_string(S) + "x" + std::to_string(S));
    resized = letterbox(image, S, 0, &tr);
    input = &resized;
  }
  const auto heads = model.forward(image_tokens<T>(*input, cfg.patch_size));
  const auto preds = to_predictions(heads, cfg);
  const double log_threshold = options.score_threshold > 0 ? std::log(options.score_threshold) : -INFINITY;

  std::vector<TextInstance> out;
  for (const auto& p : preds) {
    if (!(p.log_text_probability() >= log_threshold)) continue;
    TextInstance inst;
    inst.text = decode_transcription(p, cfg, &inst.confidence);
    std::vector<geometry::Point> pts;
    for (std::size_t j = 0; j < cfg.n_polygon_points; ++j) {
      const double x = p.polygon[2 * j] * static_cast<double>(S);
      const double y = p.polygon[2 * j + 1] * static_cast<double>(S);
      pts.push_back({(x - tr.offset_x) / tr.scale, (y - tr.offset_y) / tr.scale});
    }
    inst.polygon = geometry::Polygon(std::move(pts));
    out.push_back(std::move(inst));
  }
  return out;
}

template std::vector<QueryPrediction> to_predictions<float>(const HeadOutputs<float>&, const SpotterConfig&);
template std::vector<QueryPrediction> to_predictions<double>(const HeadOutputs<double>&, const SpotterConfig&);
template std::vector<TextInstance> spot<float>(const GrayImage&, const SpotterModel<float>&, const SpotOptions&);
template std::vector<TextInstance> spot<double>(const GrayImage&, const SpotterModel<double>&, const SpotOptions&);

}  // namespace textvpr::spotter
