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
#include <utility>
#include <vector>

namespace textvpr::training {

// Row-major rows x cols cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

struct MatchAssignment {
  // (query index, truth index), ordered by truth index.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_queries;  // ascending
  // Sum of the matched costs, accumulated in truth order.
  double total_cost = 0.0;
};

// Minimum-cost injection of truths (columns) into queries (rows), solved with
// Kuhn-Munkres on the zero-padded square matrix. Among optimal assignments the
// one whose truth-ordered query sequence is lexicographically smallest wins.
// Throws ContractError for NaN/infinite costs or rows < cols.
MatchAssignment hungarian_match(const CostMatrix& cost);

// Optimal total of a square assignment problem (no tie-breaking). Exposed
// for tests.
double assignment_cost(const CostMatrix& square, std::vector<std::size_t>* row_for_col = nullptr);

}  // namespace textvpr::training
