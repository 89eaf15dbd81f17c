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

#include "textvpr/spotter/config.hpp"

#include <algorithm>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/core/types.hpp"

namespace textvpr::spotter {

std::size_t SpotterConfig::n_char_classes() const { return kCharset.size() + 1; }

void SpotterConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractError("SpotterConfig: " + msg); };
  if (image_size == 0 || patch_size == 0 || embed_dim == 0 || n_heads == 0 || n_queries == 0 || ffn_dim == 0)
    fail("sizes must be positive");
  if (image_size % patch_size != 0) fail("patch_size must divide image_size");
  if (embed_dim % n_heads != 0) fail("embed_dim must be divisible by n_heads");
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) fail("mask_ratio must be in (0,1)");
  if (max_word_len == 0 || max_word_len > 25) fail("max_word_len must be in [1,25]");
  if (n_polygon_points < 4 || n_polygon_points % 2 != 0) fail("n_polygon_points must be even and >= 4");
  if (n_sample_points == 0) fail("n_sample_points must be positive");
  if (n_encoder_layers == 0 || n_decoder_layers == 0) fail("layer counts must be positive");
  if (pyramid_strides.empty()) fail("pyramid_strides must not be empty");
  const auto max_stride = *std::max_element(pyramid_strides.begin(), pyramid_strides.end());
  if (image_size % max_stride != 0) fail("image_size must be divisible by every pyramid stride");
  if (grid() < 2) fail("backbone grid must be at least 2x2");
  for (auto s : pyramid_strides) {
    // Levels are derived from the backbone map by 2x steps.
    bool ok = false;
    for (std::size_t f = 1; f <= 64 && !ok; f *= 2) ok = s * f == patch_size || s == patch_size * f;
    if (!ok) fail("pyramid stride " + std::to_string(s) + " is not patch_size times a power of two");
    if (image_size % s != 0) fail("image_size must be divisible by every pyramid stride");
  }
}

void to_json(nlohmann::json& j, const SpotterConfig& c) {
  j = nlohmann::json{{"image_size", c.image_size},
                     {"patch_size", c.patch_size},
                     {"embed_dim", c.embed_dim},
                     {"n_heads", c.n_heads},
                     {"n_encoder_layers", c.n_encoder_layers},
                     {"n_decoder_layers", c.n_decoder_layers},
                     {"n_queries", c.n_queries},
                     {"ffn_dim", c.ffn_dim},
                     {"mask_ratio", c.mask_ratio},
                     {"max_word_len", c.max_word_len},
                     {"n_polygon_points", c.n_polygon_points},
                     {"n_sample_points", c.n_sample_points},
                     {"pyramid_strides", c.pyramid_strides},
                     {"charset", std::string(kCharset)}};
}

void from_json(const nlohmann::json& j, SpotterConfig& c) {
  SpotterConfig d;
  c.image_size = j.value("image_size", d.image_size);
  c.patch_size = j.value("patch_size", d.patch_size);
  c.embed_dim = j.value("embed_dim", d.embed_dim);
  c.n_heads = j.value("n_heads", d.n_heads);
  c.n_encoder_layers = j.value("n_encoder_layers", d.n_encoder_layers);
  c.n_decoder_layers = j.value("n_decoder_layers", d.n_decoder_layers);
  c.n_queries = j.value("n_queries", d.n_queries);
  c.ffn_dim = j.value("ffn_dim", d.ffn_dim);
  c.mask_ratio = j.value("mask_ratio", d.mask_ratio);
  c.max_word_len = j.value("max_word_len", d.max_word_len);
  c.n_polygon_points = j.value("n_polygon_points", d.n_polygon_points);
  c.n_sample_points = j.value("n_sample_points", d.n_sample_points);
  c.pyramid_strides = j.value("pyramid_strides", d.pyramid_strides);
  if (j.contains("charset") && j.at("charset").get<std::string>() != kCharset)
    throw ValidationError("SpotterConfig: unsupported charset");
}

}  // namespace textvpr::spotter
