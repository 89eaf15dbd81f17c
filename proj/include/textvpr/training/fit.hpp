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
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "textvpr/core/types.hpp"
#include "textvpr/spotter/model.hpp"
#include "textvpr/training/loss.hpp"

namespace textvpr::training {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t steps = 3000;
  std::size_t batch_size = 4;
  LossWeights weights;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Global gradient-norm clip; 0 disables.
  double grad_clip = 1.0;

  // Throws ContractError on negative weights, non-positive batch size or a
  // negative learning rate.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

template <typename T>
struct TrainSample {
  Tensor<T> tokens;  // [P x patch_dim]
  std::vector<TrainTarget> targets;
};

template <typename T>
TrainSample<T> make_sample(const Frame& frame, const spotter::SpotterConfig& config);

struct LossRecord {
  std::size_t step = 0;
  double total = 0.0;
  double cls = 0.0;
  double poly = 0.0;
  double chr = 0.0;
};

template <typename T>
class Adam {
 public:
  Adam(double lr, double beta1, double beta2, double eps) : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

  // Applies one update from the accumulated gradients.
  void step(spotter::ParameterSet<T>& params);
  std::size_t steps_taken() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// Called after every step; returning false stops training early.
using StepCallback = std::function<bool(const LossRecord&)>;

// Throws DivergenceError when a step loss is non-finite.
template <typename T>
std::vector<LossRecord> fit(spotter::SpotterModel<T>& model, const std::vector<TrainSample<T>>& dataset,
                            const TrainConfig& config, const StepCallback& callback = {});

// step,total,cls,poly,char
std::string loss_trace_csv(const std::vector<LossRecord>& trace);

}  // namespace textvpr::training
