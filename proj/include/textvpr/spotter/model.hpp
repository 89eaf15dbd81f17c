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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "textvpr/core/ops.hpp"
#include "textvpr/core/rng.hpp"
#include "textvpr/core/tensor.hpp"
#include "textvpr/core/types.hpp"
#include "textvpr/spotter/config.hpp"

namespace textvpr::spotter {

// Named trainable tensors in registration order. The order is the checkpoint
// inventory order.
template <typename T>
class ParameterSet {
 public:
  using Entry = std::pair<std::string, Tensor<T>>;

  Tensor<T> add(std::string name, Shape shape, std::vector<T> values);

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t numel() const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Tensor<T>& at(const std::string& name);
  const Tensor<T>& at(const std::string& name) const;

  void zero_grad();

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

// Parameter group of a registered name ("backbone", "adapter", "decoder",
// "heads" or "mae").
std::string parameter_group(const std::string& name);

struct PatchMask {
  std::vector<std::size_t> visible;  // ascending
  std::vector<std::size_t> masked;   // ascending
};

// Masks exactly round(ratio * n_patches) patches chosen by a seeded uniform
// shuffle. Throws ContractError for ratio outside (0,1) or when the rounded
// count would leave nothing masked or nothing visible.
PatchMask mask_patches(std::size_t n_patches, double ratio, std::uint64_t seed);

// Splits an H x W single-channel image into row-major non-overlapping patches:
// [P x patch_size^2], each token itself row-major.
template <typename T>
Tensor<T> patchify(std::span<const T> pixels, std::size_t height, std::size_t width, std::size_t patch_size);

template <typename T>
std::vector<T> unpatchify(const Tensor<T>& tokens, std::size_t height, std::size_t width, std::size_t patch_size);

// Network input: pixel / 255, patchified.
template <typename T>
Tensor<T> image_tokens(const GrayImage& image, std::size_t patch_size);

template <typename T>
struct Linear {
  Tensor<T> weight;  // [in x out]
  Tensor<T> bias;    // [out]
  Tensor<T> operator()(const Tensor<T>& x) const { return linear(x, weight, bias); }
};

template <typename T>
struct Norm {
  Tensor<T> gain;
  Tensor<T> bias;
  Tensor<T> operator()(const Tensor<T>& x) const { return layer_norm(x, gain, bias, T(1e-5)); }
};

template <typename T>
struct Attention {
  Linear<T> qkv;
  Linear<T> out;
};

template <typename T>
struct EncoderLayer {
  Attention<T> attn;
  Norm<T> norm1;
  Linear<T> ff1, ff2;
  Norm<T> norm2;
};

template <typename T>
struct DecoderLayer {
  Attention<T> self_attn;
  Norm<T> norm1;
  Linear<T> offsets;   // d -> levels * points * 2
  Linear<T> weights;   // d -> levels * points
  Linear<T> sampled_out;
  Norm<T> norm2;
  Linear<T> ff1, ff2;
  Norm<T> norm3;
};

// Intermediate values captured for inspection.
template <typename T>
struct ForwardTrace {
  std::vector<Tensor<T>> encoder_attention;  // layer-major, head-minor, [N x N]
  std::vector<Tensor<T>> sampling_weights;   // per decoder layer, [Q x levels*points]
  std::vector<Tensor<T>> sampling_points;    // per decoder layer and level, [Q*points x 2]
  std::vector<Tensor<T>> sampled_features;   // per decoder layer and level, [Q*points x d]
};

template <typename T>
struct HeadOutputs {
  Tensor<T> class_logits;  // [Q x 2]; class 0 = text, 1 = no text
  Tensor<T> polygons;      // [Q x 2K], (x, y) pairs in [0,1]
  Tensor<T> char_logits;   // [Q x max_word_len * n_char_classes]
};

template <typename T>
struct MaeResult {
  Tensor<T> reconstruction;  // [P x patch_dim]
  Tensor<T> loss;            // [1], mean squared error over masked patches
};

template <typename T>
class SpotterModel {
 public:
  SpotterModel(const SpotterConfig& config, std::uint64_t seed);

  const SpotterConfig& config() const { return config_; }
  ParameterSet<T>& parameters() { return params_; }
  const ParameterSet<T>& parameters() const { return params_; }

  // Patch embedding + position embedding + encoder stack over the tokens at
  // `positions` (indices into the full patch grid). Returns [N x d].
  Tensor<T> encode(const Tensor<T>& tokens, std::span<const std::size_t> positions,
                   ForwardTrace<T>* trace = nullptr) const;

  // All patches, reshaped to the backbone grid [g x g x d].
  Tensor<T> encode_backbone(const Tensor<T>& tokens, ForwardTrace<T>* trace = nullptr) const;

  // Encodes the visible patches only, fills mask tokens, runs the light
  // decoder and scores the masked patches.
  MaeResult<T> mae_reconstruct(const Tensor<T>& tokens, const PatchMask& mask) const;

  // One map per pyramid stride, each [size x size x d].
  std::vector<Tensor<T>> multi_scale_adapt(const Tensor<T>& feat) const;

  Tensor<T> decode_queries(const std::vector<Tensor<T>>& pyramid, ForwardTrace<T>* trace = nullptr) const;

  HeadOutputs<T> predict_heads(const Tensor<T>& queries) const;

  // Full pipeline without masking.
  HeadOutputs<T> forward(const Tensor<T>& tokens, ForwardTrace<T>* trace = nullptr) const;

  // sigmoid of the learnable reference logits, [Q x 2].
  Tensor<T> reference_points() const;

 private:
  EncoderLayer<T> make_encoder_layer(Rng& rng, const std::string& prefix, std::size_t d, std::size_t ffn);
  Linear<T> make_linear(Rng& rng, const std::string& name, std::size_t in, std::size_t out);
  Norm<T> make_norm(const std::string& name, std::size_t d);

  SpotterConfig config_;
  ParameterSet<T> params_;

  Linear<T> patch_embed_;
  Tensor<T> pos_embed_;
  std::vector<EncoderLayer<T>> encoder_;

  std::vector<Linear<T>> level_proj_;  // one per pyramid level; unused for the identity level

  Tensor<T> query_embed_;
  Tensor<T> reference_logits_;
  std::vector<DecoderLayer<T>> decoder_;

  Linear<T> class_head_;
  Linear<T> polygon_head_;
  Linear<T> char_head_;

  Linear<T> mae_embed_;
  Tensor<T> mae_mask_token_;
  Tensor<T> mae_pos_embed_;
  EncoderLayer<T> mae_layer_;
  Linear<T> mae_head_;
};

// Copies every parameter into a model of another scalar type.
template <typename U, typename T>
SpotterModel<U> cast_model(const SpotterModel<T>& model) {
  SpotterModel<U> out(model.config(), 0);
  for (auto& [name, dst] : out.parameters().entries()) {
    const auto& src = model.parameters().at(name);
    auto d = dst.mutable_data();
    auto s = src.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<U>(s[i]);
  }
  return out;
}

// Multi-head scaled dot-product self-attention.
template <typename T>
Tensor<T> self_attention(const Attention<T>& p, const Tensor<T>& x, std::size_t n_heads,
                         std::vector<Tensor<T>>* weights_out = nullptr);

}  // namespace textvpr::spotter
