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
#include <stdexcept>
#include <string>

namespace textvpr {

// Violated precondition or invalid input value. Maps to CLI exit code 1.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shape mismatch between operands.
class DimensionError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Semantically invalid data (duplicate ids, out-of-range fields).
class ValidationError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Operation attempted in the wrong lifecycle state (e.g. a consumed tape).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Malformed input file. Carries a location: a 1-based line for text formats,
// a byte offset for binary ones. Maps to CLI exit code 2.
class ParseError : public std::runtime_error {
 public:
  enum class Unit { Line, Byte };
  ParseError(const std::string& what, std::size_t location, Unit unit = Unit::Line)
      : std::runtime_error(what + (unit == Unit::Line ? " (line " : " (byte ") +
                           std::to_string(location) + ")"),
        location_(location),
        unit_(unit) {}
  std::size_t location() const noexcept { return location_; }
  Unit unit() const noexcept { return unit_; }

 private:
  std::size_t location_;
  Unit unit_;
};

// Filesystem failure. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace textvpr
