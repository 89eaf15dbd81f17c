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

#include "textvpr/training/pretrain.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/core/ops.hpp"
#include "textvpr/core/rng.hpp"

namespace textvpr::training {

void PretrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ContractError("pretrain config: learning_rate must be finite and >= 0");
  if (batch_size == 0) throw ContractError("pretrain config: batch_size must be positive");
  if (!(grad_clip >= 0.0)) throw ContractError("pretrain config: grad_clip must be >= 0");
}

void to_json(nlohmann::json& j, const PretrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"steps", c.steps},
                     {"batch_size", c.batch_size},
                     {"seed", c.seed},
                     {"grad_clip", c.grad_clip}};
}

void from_json(const nlohmann::json& j, PretrainConfig& c) {
  PretrainConfig d;
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.steps = j.value("steps", d.steps);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.seed = j.value("seed", d.seed);
  c.grad_clip = j.value("grad_clip", d.grad_clip);
}

template <typename T>
double masked_mse(const spotter::SpotterModel<T>& model, const std::vector<Tensor<T>>& images,
                  std::uint64_t mask_seed) {
  if (images.empty()) throw ContractError("masked_mse: no images");
  const auto& cfg = model.config();
  double total = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto mask = spotter::mask_patches(cfg.n_patches(), cfg.mask_ratio, mask_seed + i);
    total += static_cast<double>(model.mae_reconstruct(images[i], mask).loss.item());
  }
  return total / static_cast<double>(images.size());
}

template <typename T>
std::vector<double> pretrain_mae(spotter::SpotterModel<T>& model, const std::vector<Tensor<T>>& images,
                                 const PretrainConfig& config) {
  config.validate();
  if (images.empty()) throw ContractError("pretrain_mae: no images");
  const auto& cfg = model.config();
  auto& params = model.parameters();
  Adam<T> opt(config.learning_rate, 0.9, 0.999, 1e-8);
  Rng rng(config.seed);
  const std::size_t batch = std::min(config.batch_size, images.size());
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();

  std::vector<double> trace;
  trace.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    params.zero_grad();
    double value = 0.0;
    {
      GradScope<T> scope;
      Tensor<T> total;
      for (std::size_t b = 0; b < batch; ++b) {
        if (cursor == order.size()) {
          rng.shuffle(order);
          cursor = 0;
        }
        const auto mask = spotter::mask_patches(cfg.n_patches(), cfg.mask_ratio, rng.next_u64());
        auto res = model.mae_reconstruct(images[order[cursor++]], mask);
        total = b == 0 ? res.loss : add(total, res.loss);
      }
      total = scale(total, T(1) / static_cast<T>(batch));
      value = static_cast<double>(total.item());
      if (!std::isfinite(value)) throw DivergenceError(step, "non-finite pretraining loss at step " + std::to_string(step));
      backward(total);
    }
    if (config.grad_clip > 0.0) {
      double sq = 0.0;
      for (auto& [name, p] : params.entries())
        if (p.has_grad())
          for (T g : p.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
      const double norm = std::sqrt(sq);
      if (norm > config.grad_clip) {
        const T f = static_cast<T>(config.grad_clip / norm);
        for (auto& [name, p] : params.entries())
          if (p.has_grad())
            for (T& g : p.mutable_grad()) g *= f;
      }
    }
    opt.step(params);
    trace.push_back(value);
  }
  return trace;
}

template double masked_mse(const spotter::SpotterModel<float>&, const std::vector<Tensor<float>>&, std::uint64_t);
template double masked_mse(const spotter::SpotterModel<double>&, const std::vector<Tensor<double>>&, std::uint64_t);
template std::vector<double> pretrain_mae(spotter::SpotterModel<float>&, const std::vector<Tensor<float>>&,
                                          const PretrainConfig&);
template std::vector<double> pretrain_mae(spotter::SpotterModel<double>&, const std::vector<Tensor<double>>&,
                                          const PretrainConfig&);

}  // namespace textvpr::training
