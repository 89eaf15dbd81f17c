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
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace textvpr::spotter {

struct SpotterConfig {
  std::size_t image_size = 128;
  std::size_t patch_size = 16;
  std::size_t embed_dim = 64;
  std::size_t n_heads = 4;
  std::size_t n_encoder_layers = 2;
  std::size_t n_decoder_layers = 2;
  std::size_t n_queries = 25;
  std::size_t ffn_dim = 128;
  double mask_ratio = 0.75;
  std::size_t max_word_len = 25;
  std::size_t n_polygon_points = 16;
  std::size_t n_sample_points = 4;
  std::vector<std::size_t> pyramid_strides{4, 8, 16, 32};

  // Throws ContractError when an invariant does not hold.
  void validate() const;

  std::size_t grid() const { return image_size / patch_size; }
  std::size_t n_patches() const { return grid() * grid(); }
  std::size_t patch_dim() const { return patch_size * patch_size; }
  std::size_t n_levels() const { return pyramid_strides.size(); }
  std::size_t level_size(std::size_t level) const { return image_size / pyramid_strides.at(level); }
  // Charset symbols plus the end-of-word class.
  std::size_t n_char_classes() const;
  std::size_t end_of_word_class() const { return n_char_classes() - 1; }

  friend bool operator==(const SpotterConfig&, const SpotterConfig&) = default;
};

void to_json(nlohmann::json& j, const SpotterConfig& c);
void from_json(const nlohmann::json& j, SpotterConfig& c);

}  // namespace textvpr::spotter
