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

#include "textvpr/spotter/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/geometry/polygon.hpp"

namespace textvpr::spotter {

template <typename T>
Tensor<T> ParameterSet<T>::add(std::string name, Shape shape, std::vector<T> values) {
  if (index_.count(name) != 0) throw ContractError("duplicate parameter name " + name);
  Tensor<T> t = Tensor<T>::from(std::move(shape), std::move(values), true);
  index_[name] = entries_.size();
  entries_.emplace_back(std::move(name), t);
  return t;
}

template <typename T>
std::size_t ParameterSet<T>::numel() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

template <typename T>
Tensor<T>& ParameterSet<T>::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter " + name);
  return entries_[it->second].second;
}

template <typename T>
const Tensor<T>& ParameterSet<T>::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("unknown parameter " + name);
  return entries_[it->second].second;
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

std::string parameter_group(const std::string& name) { return name.substr(0, name.find('.')); }

PatchMask mask_patches(std::size_t n_patches, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ContractError("mask_patches: ratio must be in (0,1)");
  const auto n_masked = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n_patches)));
  if (n_masked == 0 || n_masked >= n_patches)
    throw ContractError("mask_patches: ratio " + std::to_string(ratio) + " masks " + std::to_string(n_masked) +
                        " of " + std::to_string(n_patches) + " patches");
  std::vector<std::size_t> order(n_patches);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  PatchMask m;
  m.masked.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_masked));
  m.visible.assign(order.begin() + static_cast<std::ptrdiff_t>(n_masked), order.end());
  std::sort(m.masked.begin(), m.masked.end());
  std::sort(m.visible.begin(), m.visible.end());
  return m;
}

template <typename T>
Tensor<T> patchify(std::span<const T> pixels, std::size_t height, std::size_t width, std::size_t ps) {
  if (ps == 0 || height % ps != 0 || width % ps != 0)
    throw ContractError("patchify: image " + std::to_string(height) + "x" + std::to_string(width) +
                        " is not divisible by patch size " + std::to_string(ps));
  if (pixels.size() != height * width) throw DimensionError("patchify: pixel count does not match dimensions");
  const std::size_t gh = height / ps, gw = width / ps;
  std::vector<T> out(height * width);
  for (std::size_t pr = 0; pr < gh; ++pr)
    for (std::size_t pc = 0; pc < gw; ++pc) {
      T* dst = out.data() + (pr * gw + pc) * ps * ps;
      for (std::size_t y = 0; y < ps; ++y)
        std::copy_n(pixels.data() + (pr * ps + y) * width + pc * ps, ps, dst + y * ps);
    }
  return Tensor<T>::from({gh * gw, ps * ps}, std::move(out));
}

template <typename T>
std::vector<T> unpatchify(const Tensor<T>& tokens, std::size_t height, std::size_t width, std::size_t ps) {
  if (ps == 0 || height % ps != 0 || width % ps != 0)
    throw ContractError("unpatchify: dimensions not divisible by patch size");
  const std::size_t gh = height / ps, gw = width / ps;
  if (tokens.shape() != Shape{gh * gw, ps * ps}) throw DimensionError("unpatchify: token shape mismatch");
  std::vector<T> out(height * width);
  auto src = tokens.data();
  for (std::size_t pr = 0; pr < gh; ++pr)
    for (std::size_t pc = 0; pc < gw; ++pc) {
      const T* s = src.data() + (pr * gw + pc) * ps * ps;
      for (std::size_t y = 0; y < ps; ++y) std::copy_n(s + y * ps, ps, out.data() + (pr * ps + y) * width + pc * ps);
    }
  return out;
}

template <typename T>
Tensor<T> image_tokens(const GrayImage& image, std::size_t patch_size) {
  std::vector<T> px(image.pixels.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<T>(image.pixels[i]) / T(255);
  return patchify<T>(px, image.height, image.width, patch_size);
}

namespace {

template <typename T>
std::vector<T> sincos_table(std::size_t n, std::size_t d) {
  std::vector<T> v(n * d);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      const double a = static_cast<double>(p) * freq;
      v[p * d + i] = static_cast<T>(i % 2 == 0 ? std::sin(a) : std::cos(a));
    }
  return v;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

template <typename T>
Linear<T> SpotterModel<T>::make_linear(Rng& rng, const std::string& name, std::size_t in, std::size_t out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::vector<T> w(in * out);
  for (auto& v : w) v = static_cast<T>(rng.uniform(-limit, limit));
  Linear<T> l;
  l.weight = params_.add(name + ".weight", {in, out}, std::move(w));
  l.bias = params_.add(name + ".bias", {out}, std::vector<T>(out, T(0)));
  return l;
}

template <typename T>
Norm<T> SpotterModel<T>::make_norm(const std::string& name, std::size_t d) {
  Norm<T> n;
  n.gain = params_.add(name + ".gain", {d}, std::vector<T>(d, T(1)));
  n.bias = params_.add(name + ".bias", {d}, std::vector<T>(d, T(0)));
  return n;
}

template <typename T>
EncoderLayer<T> SpotterModel<T>::make_encoder_layer(Rng& rng, const std::string& prefix, std::size_t d,
                                                    std::size_t ffn) {
  EncoderLayer<T> l;
  l.attn.qkv = make_linear(rng, prefix + ".attn.qkv", d, 3 * d);
  l.attn.out = make_linear(rng, prefix + ".attn.out", d, d);
  l.norm1 = make_norm(prefix + ".norm1", d);
  l.ff1 = make_linear(rng, prefix + ".ff1", d, ffn);
  l.ff2 = make_linear(rng, prefix + ".ff2", ffn, d);
  l.norm2 = make_norm(prefix + ".norm2", d);
  return l;
}

template <typename T>
SpotterModel<T>::SpotterModel(const SpotterConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const std::size_t d = config_.embed_dim, P = config_.n_patches(), Q = config_.n_queries;
  const std::size_t L = config_.n_levels(), K = config_.n_sample_points;

  patch_embed_ = make_linear(rng, "backbone.patch_embed", config_.patch_dim(), d);
  pos_embed_ = params_.add("backbone.pos_embed", {P, d}, sincos_table<T>(P, d));
  for (std::size_t i = 0; i < config_.n_encoder_layers; ++i)
    encoder_.push_back(make_encoder_layer(rng, "backbone.layer" + std::to_string(i), d, config_.ffn_dim));

  for (std::size_t l = 0; l < L; ++l) {
    if (config_.pyramid_strides[l] == config_.patch_size) {
      level_proj_.push_back(Linear<T>{});
      continue;
    }
    level_proj_.push_back(make_linear(rng, "adapter.stride" + std::to_string(config_.pyramid_strides[l]), d, d));
  }

  {
    std::vector<T> q(Q * d);
    for (auto& v : q) v = static_cast<T>(rng.uniform(-0.5, 0.5));
    query_embed_ = params_.add("decoder.query_embed", {Q, d}, std::move(q));
    // Reference points start on a regular grid over the image.
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(Q))));
    const std::size_t rows = (Q + cols - 1) / cols;
    std::vector<T> r(Q * 2);
    for (std::size_t i = 0; i < Q; ++i) {
      r[2 * i] = static_cast<T>(logit((static_cast<double>(i % cols) + 0.5) / static_cast<double>(cols)));
      r[2 * i + 1] = static_cast<T>(logit((static_cast<double>(i / cols) + 0.5) / static_cast<double>(rows)));
    }
    reference_logits_ = params_.add("decoder.reference_logits", {Q, 2}, std::move(r));
  }
  for (std::size_t i = 0; i < config_.n_decoder_layers; ++i) {
    const std::string pre = "decoder.layer" + std::to_string(i);
    DecoderLayer<T> dl;
    dl.self_attn.qkv = make_linear(rng, pre + ".self_attn.qkv", d, 3 * d);
    dl.self_attn.out = make_linear(rng, pre + ".self_attn.out", d, d);
    dl.norm1 = make_norm(pre + ".norm1", d);
    // Offsets start at zero weight with a ring of unit-cell biases, sampling
    // weights start uniform.
    dl.offsets.weight = params_.add(pre + ".offsets.weight", {d, L * K * 2}, std::vector<T>(d * L * K * 2, T(0)));
    {
      std::vector<T> b(L * K * 2);
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t k = 0; k < K; ++k) {
          const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
          b[(l * K + k) * 2] = static_cast<T>(std::cos(a));
          b[(l * K + k) * 2 + 1] = static_cast<T>(std::sin(a));
        }
      dl.offsets.bias = params_.add(pre + ".offsets.bias", {L * K * 2}, std::move(b));
    }
    dl.weights.weight = params_.add(pre + ".weights.weight", {d, L * K}, std::vector<T>(d * L * K, T(0)));
    dl.weights.bias = params_.add(pre + ".weights.bias", {L * K}, std::vector<T>(L * K, T(0)));
    dl.sampled_out = make_linear(rng, pre + ".sampled_out", d, d);
    dl.norm2 = make_norm(pre + ".norm2", d);
    dl.ff1 = make_linear(rng, pre + ".ff1", d, config_.ffn_dim);
    dl.ff2 = make_linear(rng, pre + ".ff2", config_.ffn_dim, d);
    dl.norm3 = make_norm(pre + ".norm3", d);
    decoder_.push_back(std::move(dl));
  }

  class_head_ = make_linear(rng, "heads.class", d, 2);
  // Prior text probability of about 0.1.
  class_head_.bias.mutable_data()[0] = static_cast<T>(-2.2);
  const std::size_t np = config_.n_polygon_points;
  polygon_head_ = make_linear(rng, "heads.polygon", d, 2 * np);
  for (auto& v : polygon_head_.weight.mutable_data()) v *= T(0.1);
  {
    // Bias encodes a small horizontal box centred on the reference point.
    const geometry::Polygon box({{0.35, 0.46}, {0.65, 0.46}, {0.65, 0.54}, {0.35, 0.54}}, true);
    const auto pts = geometry::resample_polygon(box, np).vertices();
    auto b = polygon_head_.bias.mutable_data();
    for (std::size_t j = 0; j < np; ++j) {
      b[2 * j] = static_cast<T>(logit(pts[j].x));
      b[2 * j + 1] = static_cast<T>(logit(pts[j].y));
    }
  }
  char_head_ = make_linear(rng, "heads.chars", d, config_.max_word_len * config_.n_char_classes());

  mae_embed_ = make_linear(rng, "mae.embed", d, d);
  {
    std::vector<T> m(d);
    for (auto& v : m) v = static_cast<T>(rng.normal(0.0, 0.02));
    mae_mask_token_ = params_.add("mae.mask_token", {1, d}, std::move(m));
  }
  mae_pos_embed_ = params_.add("mae.pos_embed", {P, d}, sincos_table<T>(P, d));
  mae_layer_ = make_encoder_layer(rng, "mae.layer", d, config_.ffn_dim);
  mae_head_ = make_linear(rng, "mae.head", d, config_.patch_dim());
}

template <typename T>
Tensor<T> self_attention(const Attention<T>& p, const Tensor<T>& x, std::size_t n_heads,
                         std::vector<Tensor<T>>* weights_out) {
  const std::size_t d = x.dim(1), dh = d / n_heads;
  const Tensor<T> qkv = p.qkv(x);
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
  std::vector<Tensor<T>> heads;
  heads.reserve(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    const auto q = slice_cols(qkv, h * dh, dh);
    const auto k = slice_cols(qkv, d + h * dh, dh);
    const auto v = slice_cols(qkv, 2 * d + h * dh, dh);
    const auto w = softmax(scale(matmul(q, transpose(k)), inv_sqrt), 1);
    if (weights_out != nullptr) weights_out->push_back(w);
    heads.push_back(matmul(w, v));
  }
  return p.out(n_heads == 1 ? heads.front() : concat_cols(heads));
}

namespace {

template <typename T>
Tensor<T> encoder_block(const EncoderLayer<T>& l, const Tensor<T>& x, std::size_t n_heads,
                        std::vector<Tensor<T>>* attn) {
  auto h = l.norm1(add(x, self_attention(l.attn, x, n_heads, attn)));
  return l.norm2(add(h, l.ff2(gelu(l.ff1(h)))));
}

}  // namespace

template <typename T>
Tensor<T> SpotterModel<T>::encode(const Tensor<T>& tokens, std::span<const std::size_t> positions,
                                  ForwardTrace<T>* trace) const {
  if (tokens.rank() != 2 || tokens.dim(1) != config_.patch_dim())
    throw ContractError("encode: tokens must be [N x " + std::to_string(config_.patch_dim()) + "], got " +
                        shape_str(tokens.shape()));
  if (positions.size() != tokens.dim(0))
    throw ContractError("encode: " + std::to_string(tokens.dim(0)) + " tokens but " +
                        std::to_string(positions.size()) + " positions");
  for (auto p : positions)
    if (p >= config_.n_patches()) throw ContractError("encode: position " + std::to_string(p) + " out of range");
  auto x = add(patch_embed_(tokens), gather_rows(pos_embed_, positions));
  for (const auto& layer : encoder_)
    x = encoder_block<T>(layer, x, config_.n_heads, trace ? &trace->encoder_attention : nullptr);
  return x;
}

template <typename T>
Tensor<T> SpotterModel<T>::encode_backbone(const Tensor<T>& tokens, ForwardTrace<T>* trace) const {
  if (tokens.rank() != 2 || tokens.dim(0) != config_.n_patches())
    throw ContractError("encode_backbone: expected " + std::to_string(config_.n_patches()) + " tokens, got " +
                        shape_str(tokens.shape()));
  std::vector<std::size_t> all(config_.n_patches());
  std::iota(all.begin(), all.end(), 0);
  const auto x = encode(tokens, all, trace);
  return reshape(x, {config_.grid(), config_.grid(), config_.embed_dim});
}

template <typename T>
MaeResult<T> SpotterModel<T>::mae_reconstruct(const Tensor<T>& tokens, const PatchMask& mask) const {
  const std::size_t P = config_.n_patches();
  if (mask.masked.empty()) throw ContractError("mae_reconstruct: empty masked set");
  if (mask.visible.empty()) throw ContractError("mae_reconstruct: no visible patches");
  if (mask.masked.size() + mask.visible.size() != P) throw ContractError("mae_reconstruct: mask does not cover the grid");
  if (tokens.rank() != 2 || tokens.dim(0) != P) throw ContractError("mae_reconstruct: expected all patch tokens");

  const auto visible_tokens = gather_rows(tokens, mask.visible);
  const auto encoded = encode(visible_tokens, mask.visible);
  const auto embedded = mae_embed_(encoded);
  // Row V of the stacked source is the mask token.
  const std::size_t V = mask.visible.size();
  std::vector<std::size_t> source(P, V);
  for (std::size_t i = 0; i < V; ++i) source[mask.visible[i]] = i;
  auto full = gather_rows(concat_rows(std::vector<Tensor<T>>{embedded, mae_mask_token_}), source);
  full = add(full, mae_pos_embed_);
  full = encoder_block<T>(mae_layer_, full, config_.n_heads, nullptr);
  MaeResult<T> r;
  r.reconstruction = mae_head_(full);
  const auto pred = gather_rows(r.reconstruction, mask.masked);
  const auto target = gather_rows(tokens.detach(), mask.masked);
  const auto diff = sub(pred, target);
  r.loss = mean(mul(diff, diff));
  return r;
}

template <typename T>
std::vector<Tensor<T>> SpotterModel<T>::multi_scale_adapt(const Tensor<T>& feat) const {
  if (feat.rank() != 3 || feat.dim(0) < 2 || feat.dim(1) < 2 || feat.dim(2) != config_.embed_dim)
    throw ContractError("multi_scale_adapt: expected [h x w x d] with h, w >= 2, got " + shape_str(feat.shape()));
  const std::size_t h = feat.dim(0), w = feat.dim(1), d = feat.dim(2);
  std::vector<Tensor<T>> levels;
  for (std::size_t l = 0; l < config_.n_levels(); ++l) {
    const std::size_t stride = config_.pyramid_strides[l];
    if (stride == config_.patch_size) {
      levels.push_back(feat);
    } else if (stride < config_.patch_size) {
      // The projection is per-cell linear, so it commutes with nearest
      // upsampling; projecting first keeps the matmul at backbone size.
      auto x = reshape(level_proj_[l](reshape(feat, {h * w, d})), {h, w, d});
      for (std::size_t s = config_.patch_size; s > stride; s /= 2) x = upsample_nearest2x(x);
      levels.push_back(x);
    } else {
      auto x = feat;
      for (std::size_t s = config_.patch_size; s < stride; s *= 2) x = avg_pool2x(x);
      const std::size_t ph = x.dim(0), pw = x.dim(1);
      levels.push_back(reshape(level_proj_[l](reshape(x, {ph * pw, d})), {ph, pw, d}));
    }
  }
  return levels;
}

template <typename T>
Tensor<T> SpotterModel<T>::reference_points() const {
  return sigmoid(reference_logits_);
}

template <typename T>
Tensor<T> SpotterModel<T>::decode_queries(const std::vector<Tensor<T>>& pyramid, ForwardTrace<T>* trace) const {
  const std::size_t L = config_.n_levels(), K = config_.n_sample_points, Q = config_.n_queries;
  if (pyramid.size() != L) throw ContractError("decode_queries: expected " + std::to_string(L) + " pyramid levels");
  const auto ref = reference_points();
  std::vector<std::size_t> repeat(Q * K);
  for (std::size_t i = 0; i < Q * K; ++i) repeat[i] = i / K;
  const auto ref_rep = gather_rows(ref, repeat);

  auto q = query_embed_;
  for (const auto& layer : decoder_) {
    q = layer.norm1(add(q, self_attention<T>(layer.self_attn, q, config_.n_heads, nullptr)));

    const auto offsets = layer.offsets(q);                 // [Q x L*K*2]
    const auto weights = softmax(layer.weights(q), 1);     // [Q x L*K]
    if (trace) trace->sampling_weights.push_back(weights);
    Tensor<T> gathered;
    for (std::size_t l = 0; l < L; ++l) {
      const auto& level = pyramid[l];
      // Offsets are in units of this level's cells.
      const auto off = scale(reshape(slice_cols(offsets, l * K * 2, K * 2), {Q * K, 2}),
                             T(1) / static_cast<T>(level.dim(0)));
      const auto points = add(ref_rep, off);
      const auto samples = bilinear_sample(level, points);
      if (trace) {
        trace->sampling_points.push_back(points);
        trace->sampled_features.push_back(samples);
      }
      const auto part = group_weighted_sum(samples, slice_cols(weights, l * K, K));
      gathered = l == 0 ? part : add(gathered, part);
    }
    q = layer.norm2(add(q, layer.sampled_out(gathered)));
    q = layer.norm3(add(q, layer.ff2(gelu(layer.ff1(q)))));
  }
  return q;
}

template <typename T>
HeadOutputs<T> SpotterModel<T>::predict_heads(const Tensor<T>& queries) const {
  if (queries.rank() != 2 || queries.dim(1) != config_.embed_dim)
    throw ContractError("predict_heads: expected [Q x d] embeddings, got " + shape_str(queries.shape()));
  const std::size_t np = config_.n_polygon_points;
  std::vector<std::size_t> xy(2 * np);
  for (std::size_t j = 0; j < 2 * np; ++j) xy[j] = j % 2;
  HeadOutputs<T> h;
  h.class_logits = class_head_(queries);
  // Polygon is regressed relative to the query's reference point in logit
  // space and squashed into [0,1].
  if (queries.dim(0) != config_.n_queries)
    throw ContractError("predict_heads: expected " + std::to_string(config_.n_queries) + " query rows");
  const auto& ref = reference_logits_;
  h.polygons = sigmoid(add(polygon_head_(queries), gather_cols(ref, xy)));
  h.char_logits = char_head_(queries);
  return h;
}

template <typename T>
HeadOutputs<T> SpotterModel<T>::forward(const Tensor<T>& tokens, ForwardTrace<T>* trace) const {
  const auto feat = encode_backbone(tokens, trace);
  const auto pyramid = multi_scale_adapt(feat);
  return predict_heads(decode_queries(pyramid, trace));
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template class SpotterModel<float>;
template class SpotterModel<double>;
template Tensor<float> patchify<float>(std::span<const float>, std::size_t, std::size_t, std::size_t);
template Tensor<double> patchify<double>(std::span<const double>, std::size_t, std::size_t, std::size_t);
template std::vector<float> unpatchify<float>(const Tensor<float>&, std::size_t, std::size_t, std::size_t);
template std::vector<double> unpatchify<double>(const Tensor<double>&, std::size_t, std::size_t, std::size_t);
template Tensor<float> image_tokens<float>(const GrayImage&, std::size_t);
template Tensor<double> image_tokens<double>(const GrayImage&, std::size_t);
template Tensor<float> self_attention<float>(const Attention<float>&, const Tensor<float>&, std::size_t,
                                             std::vector<Tensor<float>>*);
template Tensor<double> self_attention<double>(const Attention<double>&, const Tensor<double>&, std::size_t,
                                               std::vector<Tensor<double>>*);

}  // namespace textvpr::spotter
