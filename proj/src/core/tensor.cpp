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

#include "textvpr/core/tensor.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "textvpr/core/error.hpp"

namespace textvpr {

namespace {
std::atomic<bool> g_checked{false};
}

void set_checked_mode(bool on) { g_checked.store(on); }
bool checked_mode() { return g_checked.load(); }

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

namespace detail {
std::uint64_t next_tensor_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw DimensionError("tensor shape must have at least one axis");
  for (auto d : shape)
    if (d == 0) throw DimensionError("tensor shape " + shape_str(shape) + " has a zero dimension");
}

}  // namespace

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  validate_shape(shape);
  auto s = std::make_shared<detail::TensorStorage<T>>();
  s->data.assign(shape_numel(shape), value);
  s->shape = std::move(shape);
  s->requires_grad = requires_grad;
  s->id = detail::next_tensor_id();
  return Tensor(std::move(s));
}

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> data, bool requires_grad) {
  validate_shape(shape);
  if (shape_numel(shape) != data.size())
    throw DimensionError("tensor shape " + shape_str(shape) + " does not match " +
                         std::to_string(data.size()) + " values");
  if (checked_mode())
    for (std::size_t i = 0; i < data.size(); ++i)
      if (!std::isfinite(data[i]))
        throw ContractError("non-finite value at flat index " + std::to_string(i));
  auto s = std::make_shared<detail::TensorStorage<T>>();
  s->shape = std::move(shape);
  s->data = std::move(data);
  s->requires_grad = requires_grad;
  s->id = detail::next_tensor_id();
  return Tensor(std::move(s));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
  return s_->data[0];
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  Tensor out = from(shape(), s_->data, requires_grad());
  out.s_->grad = s_->grad;
  return out;
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return from(shape(), s_->data, false);
}

template <typename T>
void Tape<T>::record(const char* op, std::vector<std::uint64_t> inputs, std::uint64_t output,
                     std::function<void()> backward) {
  if (consumed_) throw StateError(std::string("record(") + op + "): tape already consumed");
  nodes_.push_back(Node{op, std::move(inputs), output, std::move(backward)});
}

template <typename T>
void Tape<T>::backward(Tensor<T>& loss) {
  if (consumed_) throw StateError("backward: tape already consumed");
  if (loss.shape() != Shape{1})
    throw ContractError("backward: loss must have shape [1], got " + shape_str(loss.shape()));
  if (nodes_.empty()) throw ContractError("backward: tape is empty");
  loss.mutable_grad()[0] += T(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward();
  nodes_.clear();
  consumed_ = true;
}

namespace {
template <typename T>
Tape<T>*& tape_slot() {
  thread_local Tape<T>* slot = nullptr;
  return slot;
}
}  // namespace

template <typename T>
Tape<T>* active_tape() {
  return tape_slot<T>();
}

template <typename T>
GradScope<T>::GradScope() : previous_(tape_slot<T>()) {
  tape_slot<T>() = &tape_;
}

template <typename T>
GradScope<T>::~GradScope() {
  tape_slot<T>() = previous_;
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template class GradScope<float>;
template class GradScope<double>;
template Tape<float>* active_tape<float>();
template Tape<double>* active_tape<double>();

}  // namespace textvpr
