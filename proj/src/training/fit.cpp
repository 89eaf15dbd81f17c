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

#include "textvpr/training/fit.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/core/ops.hpp"
#include "textvpr/core/rng.hpp"

namespace textvpr::training {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ContractError("train config: learning_rate must be finite and >= 0");
  if (batch_size == 0) throw ContractError("train config: batch_size must be positive");
  if (!(weights.cls >= 0.0 && weights.poly >= 0.0 && weights.chr >= 0.0))
    throw ContractError("train config: loss weights must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ContractError("train config: bad betas");
  if (!(eps > 0.0)) throw ContractError("train config: eps must be positive");
  if (!(grad_clip >= 0.0)) throw ContractError("train config: grad_clip must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"steps", c.steps},
                     {"batch_size", c.batch_size},
                     {"loss_weights", {{"cls", c.weights.cls}, {"poly", c.weights.poly}, {"char", c.weights.chr}}},
                     {"seed", c.seed},
                     {"beta1", c.beta1},
                     {"beta2", c.beta2},
                     {"eps", c.eps},
                     {"grad_clip", c.grad_clip}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.steps = j.value("steps", d.steps);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.seed = j.value("seed", d.seed);
  c.beta1 = j.value("beta1", d.beta1);
  c.beta2 = j.value("beta2", d.beta2);
  c.eps = j.value("eps", d.eps);
  c.grad_clip = j.value("grad_clip", d.grad_clip);
  c.weights = d.weights;
  if (j.contains("loss_weights")) {
    const auto& w = j.at("loss_weights");
    c.weights.cls = w.value("cls", d.weights.cls);
    c.weights.poly = w.value("poly", d.weights.poly);
    c.weights.chr = w.value("char", d.weights.chr);
  }
}

template <typename T>
TrainSample<T> make_sample(const Frame& frame, const spotter::SpotterConfig& config) {
  if (frame.image.width != config.image_size || frame.image.height != config.image_size)
    throw ContractError("make_sample: frame " + frame.id + " does not match the model input size");
  TrainSample<T> s;
  s.tokens = spotter::image_tokens<T>(frame.image, config.patch_size);
  for (const auto& inst : frame.instances) {
    if (normalize_transcription(inst.text).empty()) continue;
    s.targets.push_back(make_target(inst, frame.image.width, frame.image.height, config));
  }
  return s;
}

template <typename T>
void Adam<T>::step(spotter::ParameterSet<T>& params) {
  auto& entries = params.entries();
  if (m_.empty()) {
    for (auto& e : entries) {
      m_.emplace_back(e.second.size(), 0.0);
      v_.emplace_back(e.second.size(), 0.0);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto& p = entries[k].second;
    if (!p.has_grad()) continue;
    auto g = p.grad();
    auto w = p.mutable_data();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      m[i] = b1_ * m[i] + (1.0 - b1_) * gi;
      v[i] = b2_ * v[i] + (1.0 - b2_) * gi * gi;
      const double upd = lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
      w[i] = static_cast<T>(static_cast<double>(w[i]) - upd);
    }
  }
}

namespace {

template <typename T>
void clip_gradients(spotter::ParameterSet<T>& params, double max_norm) {
  double sq = 0.0;
  for (auto& [name, p] : params.entries()) {
    if (!p.has_grad()) continue;
    for (T g : p.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const T f = static_cast<T>(max_norm / norm);
  for (auto& [name, p] : params.entries()) {
    if (!p.has_grad()) continue;
    for (T& g : p.mutable_grad()) g *= f;
  }
}

template <typename T>
bool all_finite(const Tensor<T>& t) {
  for (T v : t.data())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

template <typename T>
std::vector<LossRecord> fit(spotter::SpotterModel<T>& model, const std::vector<TrainSample<T>>& dataset,
                            const TrainConfig& config, const StepCallback& callback) {
  config.validate();
  if (dataset.empty()) throw ContractError("fit: empty dataset");
  const auto& cfg = model.config();
  auto& params = model.parameters();
  Adam<T> opt(config.learning_rate, config.beta1, config.beta2, config.eps);
  Rng rng(config.seed);

  const std::size_t batch = std::min(config.batch_size, dataset.size());
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();

  std::vector<LossRecord> trace;
  trace.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    params.zero_grad();
    LossRecord rec;
    rec.step = step;
    {
      GradScope<T> scope;
      Tensor<T> total;
      for (std::size_t b = 0; b < batch; ++b) {
        if (cursor == order.size()) {
          rng.shuffle(order);
          cursor = 0;
        }
        const auto& sample = dataset[order[cursor++]];
        auto heads = model.forward(sample.tokens);
        // Matching needs finite costs; a blown-up forward pass is divergence.
        if (!all_finite(heads.class_logits) || !all_finite(heads.polygons) || !all_finite(heads.char_logits))
          throw DivergenceError(step, "non-finite training loss at step " + std::to_string(step));
        auto terms = matched_loss(heads, sample.targets, config.weights, cfg);
        rec.cls += terms.cls / static_cast<double>(batch);
        rec.poly += terms.poly / static_cast<double>(batch);
        rec.chr += terms.chr / static_cast<double>(batch);
        total = b == 0 ? terms.total : add(total, terms.total);
      }
      total = scale(total, T(1) / static_cast<T>(batch));
      rec.total = static_cast<double>(total.item());
      if (!std::isfinite(rec.total)) throw DivergenceError(step, "non-finite training loss at step " + std::to_string(step));
      backward(total);
    }
    if (config.grad_clip > 0.0) clip_gradients(params, config.grad_clip);
    opt.step(params);
    trace.push_back(rec);
    if (callback && !callback(rec)) break;
  }
  return trace;
}

std::string loss_trace_csv(const std::vector<LossRecord>& trace) {
  std::string out = "step,total,cls,poly,char\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", r.step, r.total, r.cls, r.poly, r.chr);
    out += buf;
  }
  return out;
}

template TrainSample<float> make_sample<float>(const Frame&, const spotter::SpotterConfig&);
template TrainSample<double> make_sample<double>(const Frame&, const spotter::SpotterConfig&);
template class Adam<float>;
template class Adam<double>;
template std::vector<LossRecord> fit(spotter::SpotterModel<float>&, const std::vector<TrainSample<float>>&,
                                     const TrainConfig&, const StepCallback&);
template std::vector<LossRecord> fit(spotter::SpotterModel<double>&, const std::vector<TrainSample<double>>&,
                                     const TrainConfig&, const StepCallback&);

}  // namespace textvpr::training
