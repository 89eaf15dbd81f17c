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
#include <span>
#include <vector>

#include "textvpr/core/tensor.hpp"

// Differentiable primitives. Each op computes its result eagerly and, when a
// tape is active on this thread and any input requires a gradient, records a
// backward closure. Shape errors throw DimensionError naming the operands.
//
// Broadcasting is limited to a trailing-axis vector (add_bias, layer_norm).

namespace textvpr {

// [m x k] * [k x n] -> [m x n]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> transpose(const Tensor<T>& a);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise product.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);

// x[..., n] + bias[n]
template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias);

// x * w + b, with w [in x out] and b [out].
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  return add_bias(matmul(x, weight), bias);
}

// Reductions to shape [1].
template <typename T>
Tensor<T> sum(const Tensor<T>& a);

template <typename T>
Tensor<T> mean(const Tensor<T>& a);

// Max-subtracted softmax along one axis.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);

// Normalizes the last axis, then applies gain and bias (both [n]).
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps);

// tanh-approximated GELU.
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

template <typename T>
Tensor<T> abs(const Tensor<T>& x);

// Samples feat [H x W x C] at normalized points [N x 2] (x, y in [0,1]^2,
// cell centers at (j + 0.5) / W). Points are clamped into the unit square and
// neighbours are clamped to the border. Differentiable w.r.t. both inputs;
// the point gradient is zero along a clamped coordinate.
template <typename T>
Tensor<T> bilinear_sample(const Tensor<T>& feat, const Tensor<T>& points);

// [H x W x C] -> [2H x 2W x C]
template <typename T>
Tensor<T> upsample_nearest2x(const Tensor<T>& feat);

// [H x W x C] -> [H/2 x W/2 x C]; H and W must be even.
template <typename T>
Tensor<T> avg_pool2x(const Tensor<T>& feat);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

// Columns [start, start + count) of a matrix.
template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t start, std::size_t count);

template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts);

template <typename T>
Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts);

// out[i] = x[indices[i]]; repeated indices accumulate in backward.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& x, std::span<const std::size_t> indices);

template <typename T>
Tensor<T> gather_cols(const Tensor<T>& x, std::span<const std::size_t> indices);

// values [G*K x C], weights [G x K] -> [G x C], out[g] = sum_k w[g,k] values[g*K + k].
template <typename T>
Tensor<T> group_weighted_sum(const Tensor<T>& values, const Tensor<T>& weights);

// sum_i w_i * (-log softmax(logits_i)[targets_i]) over rows of [m x c].
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> targets,
                        std::span<const T> row_weights);

}  // namespace textvpr
