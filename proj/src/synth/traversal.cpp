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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/core/rng.hpp"
#include "textvpr/synth/scene.hpp"

namespace textvpr::synth {

namespace {

std::string frame_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu", prefix, i);
  return buf;
}

std::string draw_word(Rng& rng, const TraversalConfig& cfg, std::set<std::string>& used) {
  for (;;) {
    const auto len = static_cast<std::size_t>(
        rng.range(static_cast<std::int64_t>(cfg.min_word_length), static_cast<std::int64_t>(cfg.max_word_length)));
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(kCharset[rng.below(kCharset.size())]);
    if (used.insert(w).second) return w;
  }
}

// Base viewpoint for one place: words stacked in rows, horizontally jittered
// within the canvas.
SceneSpec layout_place(Rng& rng, const TraversalConfig& cfg, const std::vector<std::string>& words) {
  SceneSpec spec;
  spec.width = spec.height = cfg.canvas;
  const double canvas = static_cast<double>(cfg.canvas);
  const double row_h = canvas / static_cast<double>(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    WordSpec w;
    w.text = words[i];
    w.scale = rng.uniform(cfg.min_scale, cfg.max_scale);
    const double ww = word_width(w.text.size(), w.scale);
    const double slack_x = std::max(0.0, (canvas - ww) / 2.0 - 4.0);
    const double slack_y = std::max(0.0, (row_h - w.scale) / 2.0 - 3.0);
    w.anchor.x = canvas / 2.0 + rng.uniform(-slack_x, slack_x);
    w.anchor.y = row_h * (static_cast<double>(i) + 0.5) + rng.uniform(-slack_y, slack_y) * 0.5;
    w.rotation = rng.uniform(-0.05, 0.05);
    spec.words.push_back(std::move(w));
  }
  spec.noise_sigma = cfg.noise_sigma;
  spec.seed = rng.fork();
  return spec;
}

SceneSpec perturb(Rng& rng, const TraversalConfig& cfg, SceneSpec spec) {
  const double p = cfg.query_perturbation;
  for (auto& w : spec.words) {
    const double dx = rng.uniform(-6.0, 6.0);
    const double dy = rng.uniform(-3.0, 3.0);
    const double dr = rng.uniform(-0.08, 0.08);
    const double occ = rng.uniform() < 0.5 ? rng.uniform(0.0, 0.3) : 0.0;
    w.anchor.x += p * dx;
    w.anchor.y += p * dy;
    w.rotation += p * dr;
    w.occlusion_fraction = std::min(0.9, p * occ);
  }
  const double gain = rng.uniform(-0.3, 0.3);
  spec.illumination_gain = 1.0 + p * gain;
  spec.seed = rng.fork();
  return spec;
}

Frame to_frame(std::string id, const SceneSpec& spec) {
  auto r = render_frame(spec);
  return Frame{std::move(id), std::move(r.image), std::move(r.truth)};
}

}  // namespace

void validate(const TraversalConfig& c) {
  if (c.n_places < 1) throw ContractError("generate_traversal: n_places must be >= 1");
  if (c.words_per_place < 1) throw ContractError("generate_traversal: words_per_place must be >= 1");
  if (!(c.drop_rate >= 0.0 && c.drop_rate <= 1.0)) throw ContractError("generate_traversal: drop_rate must be in [0,1]");
  if (!(c.query_perturbation >= 0.0)) throw ContractError("generate_traversal: query_perturbation must be >= 0");
  if (!(c.noise_sigma >= 0.0)) throw ContractError("generate_traversal: noise_sigma must be >= 0");
  if (c.min_word_length < 1 || c.min_word_length > c.max_word_length || c.max_word_length > kMaxWordLength)
    throw ContractError("generate_traversal: invalid word length range");
  if (!(c.min_scale > 0.0 && c.min_scale <= c.max_scale)) throw ContractError("generate_traversal: invalid scale range");
  if (c.canvas < 16) throw ContractError("generate_traversal: canvas must be at least 16 px");
}

TraversalPair generate_traversal(const TraversalConfig& config, std::uint64_t seed) {
  validate(config);
  Rng rng(seed);
  std::set<std::string> used;

  std::vector<std::vector<std::string>> place_words(config.n_places);
  for (auto& words : place_words)
    for (std::size_t k = 0; k < config.words_per_place; ++k) words.push_back(draw_word(rng, config, used));

  const auto n_drop = static_cast<std::size_t>(std::llround(config.drop_rate * static_cast<double>(config.n_places)));
  std::vector<std::size_t> order(config.n_places);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<bool> dropped(config.n_places, false);
  for (std::size_t i = 0; i < n_drop; ++i) dropped[order[i]] = true;

  // Distractor words come after every map word is fixed, so the pools are disjoint.
  std::vector<std::vector<std::string>> distractor_words(config.n_places);
  for (std::size_t i = 0; i < config.n_places; ++i)
    if (dropped[i])
      for (std::size_t k = 0; k < config.words_per_place; ++k)
        distractor_words[i].push_back(draw_word(rng, config, used));

  TraversalPair out;
  for (std::size_t i = 0; i < config.n_places; ++i) {
    Rng place_rng(rng.fork());
    SceneSpec base = layout_place(place_rng, config, place_words[i]);
    SceneSpec query = dropped[i] ? perturb(place_rng, config, layout_place(place_rng, config, distractor_words[i]))
                                 : perturb(place_rng, config, base);
    if (config.query_perturbation == 0.0) query.seed = base.seed;
    out.map_specs.push_back(base);
    out.query_specs.push_back(query);
    out.map_frames.push_back(to_frame(frame_id("map", i), base));
    out.query_frames.push_back(to_frame(frame_id("query", i), query));
    out.correspondence.push_back(dropped[i] ? std::nullopt : std::optional<std::size_t>(i));
  }
  return out;
}

}  // namespace textvpr::synth
