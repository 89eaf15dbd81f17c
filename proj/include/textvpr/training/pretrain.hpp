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

#include "textvpr/core/types.hpp"
#include "textvpr/spotter/model.hpp"
#include "textvpr/training/fit.hpp"

namespace textvpr::training {

struct PretrainConfig {
  double learning_rate = 1e-3;
  std::size_t steps = 1000;
  std::size_t batch_size = 4;
  std::uint64_t seed = 1;
  double grad_clip = 1.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const PretrainConfig& c);
void from_json(const nlohmann::json& j, PretrainConfig& c);

// Masked-patch MSE averaged over the images, each with a mask drawn from
// `mask_seed + index`. No gradients are recorded.
template <typename T>
double masked_mse(const spotter::SpotterModel<T>& model, const std::vector<Tensor<T>>& images,
                  std::uint64_t mask_seed);

// Reconstruction training with a fresh random mask per image per step.
// Returns the per-step mean loss.
template <typename T>
std::vector<double> pretrain_mae(spotter::SpotterModel<T>& model, const std::vector<Tensor<T>>& images,
                                 const PretrainConfig& config);

}  // namespace textvpr::training
