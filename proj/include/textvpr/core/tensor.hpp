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
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace textvpr {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

// Checked mode rejects non-finite scalars when tensors are constructed from
// caller data. Off by default; the test suites turn it on.
void set_checked_mode(bool on);
bool checked_mode();

namespace detail {

template <typename T>
struct TensorStorage {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::uint64_t id = 0;

  std::vector<T>& grad_buffer() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    return grad;
  }
};

std::uint64_t next_tensor_id();

}  // namespace detail

// Dense row-major tensor with an optional gradient buffer. Copies share
// storage; use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<T> data, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(s_); }
  const Shape& shape() const { return s_->shape; }
  std::size_t rank() const { return s_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return s_->shape.at(axis); }
  std::size_t size() const { return s_->data.size(); }
  std::uint64_t id() const { return s_->id; }

  std::span<const T> data() const { return s_->data; }
  // Writes bypass the tape. Reserved for parameter updates and test harnesses.
  std::span<T> mutable_data() const { return s_->data; }

  bool has_grad() const { return !s_->grad.empty(); }
  std::span<const T> grad() const { return s_->grad; }
  std::span<T> mutable_grad() const { return s_->grad_buffer(); }
  void zero_grad() { s_->grad.clear(); }

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) { s_->requires_grad = on; }

  T item() const;
  T at(std::size_t flat) const { return s_->data.at(flat); }

  Tensor clone() const;
  // Same values, no gradient tracking.
  Tensor detach() const;

  bool same_storage(const Tensor& other) const { return s_ == other.s_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorStorage<T>> s) : s_(std::move(s)) {}
  std::shared_ptr<detail::TensorStorage<T>> s_;
};

// Append-only record of differentiable operations. Nodes are appended in
// execution order, so the sequence is topologically sorted by construction;
// backward() replays it once in reverse.
template <typename T>
class Tape {
 public:
  struct Node {
    const char* op;
    std::vector<std::uint64_t> inputs;
    std::uint64_t output;
    std::function<void()> backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(const char* op, std::vector<std::uint64_t> inputs, std::uint64_t output,
              std::function<void()> backward);

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable tensor that
  // requires a gradient. Gradients accumulate into existing buffers.
  void backward(Tensor<T>& loss);

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// The tape ops record into on this thread, or nullptr.
template <typename T>
Tape<T>* active_tape();

// RAII: installs a fresh tape as this thread's active tape.
template <typename T>
class GradScope {
 public:
  GradScope();
  ~GradScope();
  GradScope(const GradScope&) = delete;
  GradScope& operator=(const GradScope&) = delete;

  Tape<T>& tape() { return tape_; }

 private:
  Tape<T> tape_;
  Tape<T>* previous_;
};

template <typename T>
void backward(Tensor<T>& loss) {
  Tape<T>* tape = active_tape<T>();
  if (tape == nullptr) throw std::logic_error("backward: no active tape");
  tape->backward(loss);
}

}  // namespace textvpr
