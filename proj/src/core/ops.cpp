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

#include "textvpr/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "textvpr/core/error.hpp"
#include "textvpr/core/kernels.hpp"

namespace textvpr {

namespace {

template <typename T>
Tape<T>* recording_tape(std::initializer_list<const Tensor<T>*> inputs) {
  Tape<T>* tape = active_tape<T>();
  if (tape == nullptr) return nullptr;
  for (const auto* in : inputs)
    if (in->requires_grad()) return tape;
  return nullptr;
}

template <typename T, typename Fn>
void record(Tape<T>* tape, const char* op, std::vector<std::uint64_t> inputs, Tensor<T>& out,
            Fn&& fn) {
  out.set_requires_grad(true);
  tape->record(op, std::move(inputs), out.id(), std::forward<Fn>(fn));
}

template <typename T>
void require_matrix(const Tensor<T>& x, const char* op) {
  if (x.rank() != 2)
    throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_str(x.shape()));
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

template <typename T>
T clamp01(T v) {
  return std::min(std::max(v, T(0)), T(1));
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor<T> out = Tensor<T>::zeros({m, n});
  kernels::gemm_nn(m, n, k, a.data().data(), b.data().data(), out.mutable_data().data());
  if (auto* tape = recording_tape({&a, &b})) {
    record(tape, "matmul", {a.id(), b.id()}, out, [a, b, out, m, n, k]() mutable {
      if (!out.has_grad()) return;
      const T* g = out.grad().data();
      if (a.requires_grad()) kernels::gemm_nt(m, k, n, g, b.data().data(), a.mutable_grad().data());
      if (b.requires_grad()) kernels::gemm_tn(k, n, m, a.data().data(), g, b.mutable_grad().data());
    });
  }
  return out;
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  require_matrix(a, "transpose");
  const std::size_t r = a.dim(0), c = a.dim(1);
  Tensor<T> out = Tensor<T>::zeros({c, r});
  auto src = a.data();
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) dst[j * r + i] = src[i * c + j];
  if (auto* tape = recording_tape({&a})) {
    record(tape, "transpose", {a.id()}, out, [a, out, r, c]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto ga = a.mutable_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += g[j * r + i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  Tensor<T> out = a.detach();
  kernels::axpy(out.size(), T(1), b.data().data(), out.mutable_data().data());
  if (auto* tape = recording_tape({&a, &b})) {
    record(tape, "add", {a.id(), b.id()}, out, [a, b, out]() mutable {
      if (!out.has_grad()) return;
      const T* g = out.grad().data();
      if (a.requires_grad()) kernels::axpy(a.size(), T(1), g, a.mutable_grad().data());
      if (b.requires_grad()) kernels::axpy(b.size(), T(1), g, b.mutable_grad().data());
    });
  }
  return out;
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "sub");
  Tensor<T> out = a.detach();
  kernels::axpy(out.size(), T(-1), b.data().data(), out.mutable_data().data());
  if (auto* tape = recording_tape({&a, &b})) {
    record(tape, "sub", {a.id(), b.id()}, out, [a, b, out]() mutable {
      if (!out.has_grad()) return;
      const T* g = out.grad().data();
      if (a.requires_grad()) kernels::axpy(a.size(), T(1), g, a.mutable_grad().data());
      if (b.requires_grad()) kernels::axpy(b.size(), T(-1), g, b.mutable_grad().data());
    });
  }
  return out;
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  Tensor<T> out = Tensor<T>::zeros(a.shape());
  auto x = a.data(), y = b.data();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  if (auto* tape = recording_tape({&a, &b})) {
    record(tape, "mul", {a.id(), b.id()}, out, [a, b, out]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        auto y = b.data();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        auto x = a.data();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  Tensor<T> out = Tensor<T>::zeros(a.shape());
  kernels::axpy(a.size(), factor, a.data().data(), out.mutable_data().data());
  if (auto* tape = recording_tape({&a})) {
    record(tape, "scale", {a.id()}, out, [a, out, factor]() mutable {
      if (!out.has_grad()) return;
      kernels::axpy(a.size(), factor, out.grad().data(), a.mutable_grad().data());
    });
  }
  return out;
}

template <typename T>
Tensor<T> add_bias(const Tensor<T>& x, const Tensor<T>& bias) {
  const std::size_t n = x.shape().back();
  if (bias.rank() != 1 || bias.dim(0) != n)
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) + " does not match last axis of " +
                         shape_str(x.shape()));
  Tensor<T> out = x.detach();
  auto o = out.mutable_data();
  auto b = bias.data();
  const std::size_t rows = x.size() / n;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < n; ++j) o[r * n + j] += b[j];
  if (auto* tape = recording_tape({&x, &bias})) {
    record(tape, "add_bias", {x.id(), bias.id()}, out, [x, bias, out, rows, n]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      if (x.requires_grad()) kernels::axpy(g.size(), T(1), g.data(), x.mutable_grad().data());
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < n; ++j) gb[j] += g[r * n + j];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T acc = 0;
  for (T v : a.data()) acc += v;
  Tensor<T> out = Tensor<T>::scalar(acc);
  if (auto* tape = recording_tape({&a})) {
    record(tape, "sum", {a.id()}, out, [a, out]() mutable {
      if (!out.has_grad()) return;
      const T g = out.grad()[0];
      for (auto& v : a.mutable_grad()) v += g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  if (axis >= x.rank())
    throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for shape " +
                         shape_str(x.shape()));
  const auto& sh = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= sh[i];
  for (std::size_t i = axis + 1; i < sh.size(); ++i) inner *= sh[i];
  const std::size_t len = sh[axis];
  Tensor<T> out = Tensor<T>::zeros(sh);
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t a = 0; a < outer; ++a) {
    for (std::size_t b = 0; b < inner; ++b) {
      const std::size_t base = a * len * inner + b;
      T mx = in[base];
      for (std::size_t i = 1; i < len; ++i) mx = std::max(mx, in[base + i * inner]);
      T total = 0;
      for (std::size_t i = 0; i < len; ++i) {
        const T e = std::exp(in[base + i * inner] - mx);
        o[base + i * inner] = e;
        total += e;
      }
      const T inv = T(1) / total;
      for (std::size_t i = 0; i < len; ++i) o[base + i * inner] *= inv;
    }
  }
  if (auto* tape = recording_tape({&x})) {
    record(tape, "softmax", {x.id()}, out, [x, out, outer, inner, len]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto y = out.data();
      auto gx = x.mutable_grad();
      for (std::size_t a = 0; a < outer; ++a) {
        for (std::size_t b = 0; b < inner; ++b) {
          const std::size_t base = a * len * inner + b;
          T dotv = 0;
          for (std::size_t i = 0; i < len; ++i) dotv += g[base + i * inner] * y[base + i * inner];
          for (std::size_t i = 0; i < len; ++i) {
            const std::size_t k = base + i * inner;
            gx[k] += y[k] * (g[k] - dotv);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps) {
  const std::size_t n = x.shape().back();
  if (gain.rank() != 1 || bias.rank() != 1 || gain.dim(0) != n || bias.dim(0) != n)
    throw DimensionError("layer_norm: gain " + shape_str(gain.shape()) + " / bias " +
                         shape_str(bias.shape()) + " do not match last axis of " + shape_str(x.shape()));
  if (!(eps > T(0))) throw ContractError("layer_norm: eps must be positive");
  const std::size_t rows = x.size() / n;
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  std::vector<T> xhat(x.size());
  std::vector<T> inv_std(rows);
  auto in = x.data();
  auto g = gain.data();
  auto b = bias.data();
  auto o = out.mutable_data();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = in.data() + r * n;
    T mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<T>(n);
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<T>(n);
    const T inv = T(1) / std::sqrt(var + eps);
    inv_std[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      const T h = (row[j] - mu) * inv;
      xhat[r * n + j] = h;
      o[r * n + j] = h * g[j] + b[j];
    }
  }
  if (auto* tape = recording_tape({&x, &gain, &bias})) {
    record(tape, "layer_norm", {x.id(), gain.id(), bias.id()}, out,
           [x, gain, bias, out, xhat = std::move(xhat), inv_std = std::move(inv_std), rows,
            n]() mutable {
             if (!out.has_grad()) return;
             auto dy = out.grad();
             auto gv = gain.data();
             if (gain.requires_grad()) {
               auto dg = gain.mutable_grad();
               for (std::size_t r = 0; r < rows; ++r)
                 for (std::size_t j = 0; j < n; ++j) dg[j] += dy[r * n + j] * xhat[r * n + j];
             }
             if (bias.requires_grad()) {
               auto db = bias.mutable_grad();
               for (std::size_t r = 0; r < rows; ++r)
                 for (std::size_t j = 0; j < n; ++j) db[j] += dy[r * n + j];
             }
             if (x.requires_grad()) {
               auto dx = x.mutable_grad();
               std::vector<T> dh(n);
               for (std::size_t r = 0; r < rows; ++r) {
                 T mean_dh = 0, mean_dh_h = 0;
                 for (std::size_t j = 0; j < n; ++j) {
                   dh[j] = dy[r * n + j] * gv[j];
                   mean_dh += dh[j];
                   mean_dh_h += dh[j] * xhat[r * n + j];
                 }
                 mean_dh /= static_cast<T>(n);
                 mean_dh_h /= static_cast<T>(n);
                 for (std::size_t j = 0; j < n; ++j)
                   dx[r * n + j] += inv_std[r] * (dh[j] - mean_dh - xhat[r * n + j] * mean_dh_h);
               }
             }
           });
  }
  return out;
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  const T c = std::sqrt(T(2) / std::numbers::pi_v<T>);
  const T k = T(0.044715);
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T v = in[i];
    o[i] = T(0.5) * v * (T(1) + std::tanh(c * (v + k * v * v * v)));
  }
  if (auto* tape = recording_tape({&x})) {
    record(tape, "gelu", {x.id()}, out, [x, out, c, k]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto in = x.data();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < in.size(); ++i) {
        const T v = in[i];
        const T t = std::tanh(c * (v + k * v * v * v));
        const T dt = (T(1) - t * t) * c * (T(1) + T(3) * k * v * v);
        gx[i] += g[i] * (T(0.5) * (T(1) + t) + T(0.5) * v * dt);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T v = in[i];
    if (v >= 0) {
      o[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      o[i] = e / (T(1) + e);
    }
  }
  if (auto* tape = recording_tape({&x})) {
    record(tape, "sigmoid", {x.id()}, out, [x, out]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto y = out.data();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < y.size(); ++i) gx[i] += g[i] * y[i] * (T(1) - y[i]);
    });
  }
  return out;
}

template <typename T>
Tensor<T> abs(const Tensor<T>& x) {
  Tensor<T> out = Tensor<T>::zeros(x.shape());
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = std::abs(in[i]);
  if (auto* tape = recording_tape({&x})) {
    record(tape, "abs", {x.id()}, out, [x, out]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto in = x.data();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < in.size(); ++i)
        gx[i] += in[i] > 0 ? g[i] : (in[i] < 0 ? -g[i] : T(0));
    });
  }
  return out;
}

namespace {

// Corner indices and weights for one sample point.
template <typename T>
struct BilinearTap {
  std::size_t i0, i1, j0, j1;
  T fx, fy;
  bool clamped_x, clamped_y;
};

template <typename T>
BilinearTap<T> bilinear_tap(T px, T py, std::size_t h, std::size_t w) {
  BilinearTap<T> t{};
  t.clamped_x = px < T(0) || px > T(1);
  t.clamped_y = py < T(0) || py > T(1);
  const T u = clamp01(px) * static_cast<T>(w) - T(0.5);
  const T v = clamp01(py) * static_cast<T>(h) - T(0.5);
  const T fu = std::floor(u), fv = std::floor(v);
  t.fx = u - fu;
  t.fy = v - fv;
  const auto clampi = [](long long idx, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long long>(idx, 0, static_cast<long long>(n) - 1));
  };
  const auto ju = static_cast<long long>(fu), iv = static_cast<long long>(fv);
  t.j0 = clampi(ju, w);
  t.j1 = clampi(ju + 1, w);
  t.i0 = clampi(iv, h);
  t.i1 = clampi(iv + 1, h);
  return t;
}

}  // namespace

template <typename T>
Tensor<T> bilinear_sample(const Tensor<T>& feat, const Tensor<T>& points) {
  if (feat.rank() != 3)
    throw DimensionError("bilinear_sample: feature map must be [H x W x C], got " +
                         shape_str(feat.shape()));
  if (points.rank() != 2 || points.dim(1) != 2)
    throw DimensionError("bilinear_sample: points must be [N x 2], got " + shape_str(points.shape()));
  const std::size_t h = feat.dim(0), w = feat.dim(1), c = feat.dim(2), n = points.dim(0);
  Tensor<T> out = Tensor<T>::zeros({n, c});
  auto f = feat.data();
  auto p = points.data();
  auto o = out.mutable_data();
  for (std::size_t q = 0; q < n; ++q) {
    const auto t = bilinear_tap(p[2 * q], p[2 * q + 1], h, w);
    const T w00 = (1 - t.fy) * (1 - t.fx), w01 = (1 - t.fy) * t.fx;
    const T w10 = t.fy * (1 - t.fx), w11 = t.fy * t.fx;
    const T* f00 = f.data() + (t.i0 * w + t.j0) * c;
    const T* f01 = f.data() + (t.i0 * w + t.j1) * c;
    const T* f10 = f.data() + (t.i1 * w + t.j0) * c;
    const T* f11 = f.data() + (t.i1 * w + t.j1) * c;
    T* dst = o.data() + q * c;
    for (std::size_t k = 0; k < c; ++k) dst[k] = w00 * f00[k] + w01 * f01[k] + w10 * f10[k] + w11 * f11[k];
  }
  if (auto* tape = recording_tape({&feat, &points})) {
    record(tape, "bilinear_sample", {feat.id(), points.id()}, out,
           [feat, points, out, h, w, c, n]() mutable {
             if (!out.has_grad()) return;
             auto g = out.grad();
             auto p = points.data();
             auto f = feat.data();
             T* gf = feat.requires_grad() ? feat.mutable_grad().data() : nullptr;
             T* gp = points.requires_grad() ? points.mutable_grad().data() : nullptr;
             for (std::size_t q = 0; q < n; ++q) {
               const auto t = bilinear_tap(p[2 * q], p[2 * q + 1], h, w);
               const T* gq = g.data() + q * c;
               const std::size_t o00 = (t.i0 * w + t.j0) * c, o01 = (t.i0 * w + t.j1) * c;
               const std::size_t o10 = (t.i1 * w + t.j0) * c, o11 = (t.i1 * w + t.j1) * c;
               if (gf != nullptr) {
                 const T w00 = (1 - t.fy) * (1 - t.fx), w01 = (1 - t.fy) * t.fx;
                 const T w10 = t.fy * (1 - t.fx), w11 = t.fy * t.fx;
                 for (std::size_t k = 0; k < c; ++k) {
                   gf[o00 + k] += w00 * gq[k];
                   gf[o01 + k] += w01 * gq[k];
                   gf[o10 + k] += w10 * gq[k];
                   gf[o11 + k] += w11 * gq[k];
                 }
               }
               if (gp != nullptr) {
                 T du = 0, dv = 0;
                 for (std::size_t k = 0; k < c; ++k) {
                   const T a = f[o00 + k], b = f[o01 + k], cc = f[o10 + k], d = f[o11 + k];
                   du += gq[k] * ((1 - t.fy) * (b - a) + t.fy * (d - cc));
                   dv += gq[k] * ((1 - t.fx) * (cc - a) + t.fx * (d - b));
                 }
                 if (!t.clamped_x) gp[2 * q] += du * static_cast<T>(w);
                 if (!t.clamped_y) gp[2 * q + 1] += dv * static_cast<T>(h);
               }
             }
           });
  }
  return out;
}

template <typename T>
Tensor<T> upsample_nearest2x(const Tensor<T>& feat) {
  if (feat.rank() != 3)
    throw DimensionError("upsample_nearest2x: expected [H x W x C], got " + shape_str(feat.shape()));
  const std::size_t h = feat.dim(0), w = feat.dim(1), c = feat.dim(2);
  Tensor<T> out = Tensor<T>::zeros({2 * h, 2 * w, c});
  auto f = feat.data();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < 2 * h; ++i)
    for (std::size_t j = 0; j < 2 * w; ++j)
      std::copy_n(f.data() + ((i / 2) * w + j / 2) * c, c, o.data() + (i * 2 * w + j) * c);
  if (auto* tape = recording_tape({&feat})) {
    record(tape, "upsample_nearest2x", {feat.id()}, out, [feat, out, h, w, c]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto gf = feat.mutable_grad();
      for (std::size_t i = 0; i < 2 * h; ++i)
        for (std::size_t j = 0; j < 2 * w; ++j) {
          const T* src = g.data() + (i * 2 * w + j) * c;
          T* dst = gf.data() + ((i / 2) * w + j / 2) * c;
          for (std::size_t k = 0; k < c; ++k) dst[k] += src[k];
        }
    });
  }
  return out;
}

template <typename T>
Tensor<T> avg_pool2x(const Tensor<T>& feat) {
  if (feat.rank() != 3 || feat.dim(0) % 2 != 0 || feat.dim(1) % 2 != 0)
    throw DimensionError("avg_pool2x: expected [H x W x C] with even H, W, got " +
                         shape_str(feat.shape()));
  const std::size_t h = feat.dim(0) / 2, w = feat.dim(1) / 2, c = feat.dim(2);
  Tensor<T> out = Tensor<T>::zeros({h, w, c});
  auto f = feat.data();
  auto o = out.mutable_data();
  const std::size_t src_w = 2 * w;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      T* dst = o.data() + (i * w + j) * c;
      for (std::size_t di = 0; di < 2; ++di)
        for (std::size_t dj = 0; dj < 2; ++dj) {
          const T* src = f.data() + ((2 * i + di) * src_w + 2 * j + dj) * c;
          for (std::size_t k = 0; k < c; ++k) dst[k] += src[k];
        }
      for (std::size_t k = 0; k < c; ++k) dst[k] *= T(0.25);
    }
  if (auto* tape = recording_tape({&feat})) {
    record(tape, "avg_pool2x", {feat.id()}, out, [feat, out, h, w, c, src_w]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto gf = feat.mutable_grad();
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const T* src = g.data() + (i * w + j) * c;
          for (std::size_t di = 0; di < 2; ++di)
            for (std::size_t dj = 0; dj < 2; ++dj) {
              T* dst = gf.data() + ((2 * i + di) * src_w + 2 * j + dj) * c;
              for (std::size_t k = 0; k < c; ++k) dst[k] += T(0.25) * src[k];
            }
        }
    });
  }
  return out;
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.size())
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  Tensor<T> out = Tensor<T>::from(std::move(shape), std::vector<T>(x.data().begin(), x.data().end()));
  if (auto* tape = recording_tape({&x})) {
    record(tape, "reshape", {x.id()}, out, [x, out]() mutable {
      if (!out.has_grad()) return;
      kernels::axpy(x.size(), T(1), out.grad().data(), x.mutable_grad().data());
    });
  }
  return out;
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& x, std::size_t start, std::size_t count) {
  require_matrix(x, "slice_cols");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (count == 0 || start + count > cols)
    throw DimensionError("slice_cols: columns [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of range for " + shape_str(x.shape()));
  Tensor<T> out = Tensor<T>::zeros({rows, count});
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(in.data() + r * cols + start, count, o.data() + r * count);
  if (auto* tape = recording_tape({&x})) {
    record(tape, "slice_cols", {x.id()}, out, [x, out, rows, cols, start, count]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < count; ++j) gx[r * cols + start + j] += g[r * count + j];
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts.front().dim(0);
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require_matrix(p, "concat_cols");
    if (p.dim(0) != rows)
      throw DimensionError("concat_cols: row mismatch " + shape_str(parts.front().shape()) + " vs " +
                           shape_str(p.shape()));
    cols += p.dim(1);
  }
  Tensor<T> out = Tensor<T>::zeros({rows, cols});
  auto o = out.mutable_data();
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t pc = p.dim(1);
    auto in = p.data();
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(in.data() + r * pc, pc, o.data() + r * cols + off);
    off += pc;
  }
  Tape<T>* tape = active_tape<T>();
  const bool any = std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.requires_grad(); });
  if (tape != nullptr && any) {
    std::vector<std::uint64_t> ids;
    for (const auto& p : parts) ids.push_back(p.id());
    record(tape, "concat_cols", std::move(ids), out, [parts, out, rows, cols]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      std::size_t off = 0;
      for (auto& p : parts) {
        const std::size_t pc = p.dim(1);
        if (p.requires_grad()) {
          auto gp = p.mutable_grad();
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < pc; ++j) gp[r * pc + j] += g[r * cols + off + j];
        }
        off += pc;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat_rows(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t cols = parts.front().dim(1);
  std::size_t rows = 0;
  for (const auto& p : parts) {
    require_matrix(p, "concat_rows");
    if (p.dim(1) != cols)
      throw DimensionError("concat_rows: column mismatch " + shape_str(parts.front().shape()) + " vs " +
                           shape_str(p.shape()));
    rows += p.dim(0);
  }
  Tensor<T> out = Tensor<T>::zeros({rows, cols});
  auto o = out.mutable_data();
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p.data().begin(), p.data().end(), o.begin() + static_cast<std::ptrdiff_t>(off));
    off += p.size();
  }
  Tape<T>* tape = active_tape<T>();
  const bool any = std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.requires_grad(); });
  if (tape != nullptr && any) {
    std::vector<std::uint64_t> ids;
    for (const auto& p : parts) ids.push_back(p.id());
    record(tape, "concat_rows", std::move(ids), out, [parts, out]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      std::size_t off = 0;
      for (auto& p : parts) {
        if (p.requires_grad()) kernels::axpy(p.size(), T(1), g.data() + off, p.mutable_grad().data());
        off += p.size();
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& x, std::span<const std::size_t> indices) {
  require_matrix(x, "gather_rows");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (indices.empty()) throw DimensionError("gather_rows: empty index list");
  for (auto i : indices)
    if (i >= rows)
      throw DimensionError("gather_rows: index " + std::to_string(i) + " out of range for " +
                           shape_str(x.shape()));
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  Tensor<T> out = Tensor<T>::zeros({idx.size(), cols});
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t r = 0; r < idx.size(); ++r) std::copy_n(in.data() + idx[r] * cols, cols, o.data() + r * cols);
  if (auto* tape = recording_tape({&x})) {
    record(tape, "gather_rows", {x.id()}, out, [x, out, idx = std::move(idx), cols]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < idx.size(); ++r)
        kernels::axpy(cols, T(1), g.data() + r * cols, gx.data() + idx[r] * cols);
    });
  }
  return out;
}

template <typename T>
Tensor<T> gather_cols(const Tensor<T>& x, std::span<const std::size_t> indices) {
  require_matrix(x, "gather_cols");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (indices.empty()) throw DimensionError("gather_cols: empty index list");
  for (auto i : indices)
    if (i >= cols)
      throw DimensionError("gather_cols: index " + std::to_string(i) + " out of range for " +
                           shape_str(x.shape()));
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  const std::size_t n = idx.size();
  Tensor<T> out = Tensor<T>::zeros({rows, n});
  auto in = x.data();
  auto o = out.mutable_data();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < n; ++j) o[r * n + j] = in[r * cols + idx[j]];
  if (auto* tape = recording_tape({&x})) {
    record(tape, "gather_cols", {x.id()}, out, [x, out, idx = std::move(idx), rows, cols, n]() mutable {
      if (!out.has_grad()) return;
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < n; ++j) gx[r * cols + idx[j]] += g[r * n + j];
    });
  }
  return out;
}

template <typename T>
Tensor<T> group_weighted_sum(const Tensor<T>& values, const Tensor<T>& weights) {
  require_matrix(values, "group_weighted_sum");
  require_matrix(weights, "group_weighted_sum");
  const std::size_t g = weights.dim(0), k = weights.dim(1), c = values.dim(1);
  if (values.dim(0) != g * k)
    throw DimensionError("group_weighted_sum: values " + shape_str(values.shape()) +
                         " incompatible with weights " + shape_str(weights.shape()));
  Tensor<T> out = Tensor<T>::zeros({g, c});
  auto v = values.data();
  auto w = weights.data();
  auto o = out.mutable_data();
  for (std::size_t q = 0; q < g; ++q)
    for (std::size_t p = 0; p < k; ++p)
      kernels::axpy(c, w[q * k + p], v.data() + (q * k + p) * c, o.data() + q * c);
  if (auto* tape = recording_tape({&values, &weights})) {
    record(tape, "group_weighted_sum", {values.id(), weights.id()}, out,
           [values, weights, out, g, k, c]() mutable {
             if (!out.has_grad()) return;
             auto go = out.grad();
             auto v = values.data();
             auto w = weights.data();
             if (values.requires_grad()) {
               auto gv = values.mutable_grad();
               for (std::size_t q = 0; q < g; ++q)
                 for (std::size_t p = 0; p < k; ++p)
                   kernels::axpy(c, w[q * k + p], go.data() + q * c, gv.data() + (q * k + p) * c);
             }
             if (weights.requires_grad()) {
               auto gw = weights.mutable_grad();
               for (std::size_t q = 0; q < g; ++q)
                 for (std::size_t p = 0; p < k; ++p)
                   gw[q * k + p] += kernels::dot(c, go.data() + q * c, v.data() + (q * k + p) * c);
             }
           });
  }
  return out;
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> targets,
                        std::span<const T> row_weights) {
  require_matrix(logits, "cross_entropy");
  const std::size_t m = logits.dim(0), c = logits.dim(1);
  if (targets.size() != m || row_weights.size() != m)
    throw DimensionError("cross_entropy: " + std::to_string(targets.size()) + " targets / " +
                         std::to_string(row_weights.size()) + " weights for logits " +
                         shape_str(logits.shape()));
  for (auto t : targets)
    if (t >= c) throw DimensionError("cross_entropy: target class " + std::to_string(t) + " >= " + std::to_string(c));
  std::vector<T> probs(m * c);
  auto in = logits.data();
  T total = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const T* row = in.data() + r * c;
    T mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    T z = 0;
    for (std::size_t j = 0; j < c; ++j) {
      probs[r * c + j] = std::exp(row[j] - mx);
      z += probs[r * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) probs[r * c + j] /= z;
    total += row_weights[r] * (mx + std::log(z) - row[targets[r]]);
  }
  Tensor<T> out = Tensor<T>::scalar(total);
  if (auto* tape = recording_tape({&logits})) {
    std::vector<std::size_t> tg(targets.begin(), targets.end());
    std::vector<T> wt(row_weights.begin(), row_weights.end());
    record(tape, "cross_entropy", {logits.id()}, out,
           [logits, out, probs = std::move(probs), tg = std::move(tg), wt = std::move(wt), m,
            c]() mutable {
             if (!out.has_grad()) return;
             const T g = out.grad()[0];
             auto gl = logits.mutable_grad();
             for (std::size_t r = 0; r < m; ++r) {
               const T s = g * wt[r];
               if (s == T(0)) continue;
               for (std::size_t j = 0; j < c; ++j) gl[r * c + j] += s * probs[r * c + j];
               gl[r * c + tg[r]] -= s;
             }
           });
  }
  return out;
}

#define TEXTVPR_INSTANTIATE_OPS(T)                                                              \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> transpose(const Tensor<T>&);                                               \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                   \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                   \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                   \
  template Tensor<T> scale(const Tensor<T>&, T);                                                \
  template Tensor<T> add_bias(const Tensor<T>&, const Tensor<T>&);                              \
  template Tensor<T> sum(const Tensor<T>&);                                                     \
  template Tensor<T> mean(const Tensor<T>&);                                                    \
  template Tensor<T> softmax(const Tensor<T>&, std::size_t);                                    \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);       \
  template Tensor<T> gelu(const Tensor<T>&);                                                    \
  template Tensor<T> sigmoid(const Tensor<T>&);                                                 \
  template Tensor<T> abs(const Tensor<T>&);                                                     \
  template Tensor<T> bilinear_sample(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> upsample_nearest2x(const Tensor<T>&);                                      \
  template Tensor<T> avg_pool2x(const Tensor<T>&);                                              \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                          \
  template Tensor<T> slice_cols(const Tensor<T>&, std::size_t, std::size_t);                    \
  template Tensor<T> concat_cols(const std::vector<Tensor<T>>&);                                \
  template Tensor<T> concat_rows(const std::vector<Tensor<T>>&);                                \
  template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::size_t>);               \
  template Tensor<T> gather_cols(const Tensor<T>&, std::span<const std::size_t>);               \
  template Tensor<T> group_weighted_sum(const Tensor<T>&, const Tensor<T>&);                    \
  template Tensor<T> cross_entropy(const Tensor<T>&, std::span<const std::size_t>, std::span<const T>);

TEXTVPR_INSTANTIATE_OPS(float)
TEXTVPR_INSTANTIATE_OPS(double)

}  // namespace textvpr
