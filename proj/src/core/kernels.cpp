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

#include "textvpr/core/kernels.hpp"

#include <atomic>
#include <vector>

#include "textvpr/core/error.hpp"

namespace textvpr::kernels {

#ifndef TEXTVPR_HAVE_AVX2_TU
// Non-x86 builds: the AVX2 entry points forward to the reference kernels and
// avx2_available() reports false, so they are never selected.
namespace avx2 {
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b, float* c) {
  scalar::gemm_nn(m, n, k, a, b, c);
}
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  scalar::gemm_nn(m, n, k, a, b, c);
}
float dot(std::size_t n, const float* x, const float* y) { return scalar::dot(n, x, y); }
double dot(std::size_t n, const double* x, const double* y) { return scalar::dot(n, x, y); }
void axpy(std::size_t n, float alpha, const float* x, float* y) { scalar::axpy(n, alpha, x, y); }
void axpy(std::size_t n, double alpha, const double* x, double* y) { scalar::axpy(n, alpha, x, y); }
}  // namespace avx2
#endif

namespace {

bool detect_avx2() {
#if defined(TEXTVPR_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& isa_slot() {
  static std::atomic<Isa> slot{detect_avx2() ? Isa::Avx2 : Isa::Scalar};
  return slot;
}

template <typename T>
std::vector<T>& scratch() {
  thread_local std::vector<T> buf;
  return buf;
}

template <typename T>
void transpose_into(std::size_t rows, std::size_t cols, const T* src, std::vector<T>& dst) {
  dst.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
}

template <typename T>
void gemm_nn_dispatch(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  if (m == 0 || n == 0 || k == 0) return;
  if (active_isa() == Isa::Avx2)
    avx2::gemm_nn(m, n, k, a, b, c);
  else
    scalar::gemm_nn(m, n, k, a, b, c);
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
  static const bool ok = detect_avx2();
  return ok;
}

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available())
    throw ContractError("force_isa: AVX2/FMA not supported on this CPU");
  isa_slot().store(isa);
}

void reset_isa() { isa_slot().store(avx2_available() ? Isa::Avx2 : Isa::Scalar); }

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b, float* c) {
  gemm_nn_dispatch(m, n, k, a, b, c);
}
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  gemm_nn_dispatch(m, n, k, a, b, c);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b, float* c) {
  auto& bt = scratch<float>();
  transpose_into(n, k, b, bt);
  gemm_nn_dispatch(m, n, k, a, bt.data(), c);
}
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  auto& bt = scratch<double>();
  transpose_into(n, k, b, bt);
  gemm_nn_dispatch(m, n, k, a, bt.data(), c);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b, float* c) {
  auto& at = scratch<float>();
  transpose_into(k, m, a, at);
  gemm_nn_dispatch(m, n, k, at.data(), b, c);
}
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  auto& at = scratch<double>();
  transpose_into(k, m, a, at);
  gemm_nn_dispatch(m, n, k, at.data(), b, c);
}

float dot(std::size_t n, const float* x, const float* y) {
  return active_isa() == Isa::Avx2 ? avx2::dot(n, x, y) : scalar::dot(n, x, y);
}
double dot(std::size_t n, const double* x, const double* y) {
  return active_isa() == Isa::Avx2 ? avx2::dot(n, x, y) : scalar::dot(n, x, y);
}
void axpy(std::size_t n, float alpha, const float* x, float* y) {
  if (active_isa() == Isa::Avx2)
    avx2::axpy(n, alpha, x, y);
  else
    scalar::axpy(n, alpha, x, y);
}
void axpy(std::size_t n, double alpha, const double* x, double* y) {
  if (active_isa() == Isa::Avx2)
    avx2::axpy(n, alpha, x, y);
  else
    scalar::axpy(n, alpha, x, y);
}

}  // namespace textvpr::kernels
