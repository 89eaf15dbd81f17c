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

#include "textvpr/training/hungarian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "textvpr/core/error.hpp"

namespace textvpr::training {

namespace {

// O(n^3) shortest augmenting path formulation with row/column potentials.
// p[j] is the row matched to column j (1-based, 0 = none).
std::vector<std::size_t> solve_square(const std::vector<double>& a, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return p;
}

// Optimal cost of assigning the listed truths to the listed queries.
double sub_problem_cost(const CostMatrix& cost, const std::vector<std::size_t>& queries,
                        const std::vector<std::size_t>& truths) {
  if (truths.empty()) return 0.0;
  const std::size_t n = queries.size();
  CostMatrix sq(n, n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < truths.size(); ++c) sq.at(r, c) = cost.at(queries[r], truths[c]);
  return assignment_cost(sq);
}

}  // namespace

double assignment_cost(const CostMatrix& square, std::vector<std::size_t>* row_for_col) {
  if (square.rows != square.cols) throw ContractError("assignment_cost: matrix must be square");
  const std::size_t n = square.rows;
  if (n == 0) return 0.0;
  const auto p = solve_square(square.values, n);
  double total = 0.0;
  if (row_for_col != nullptr) row_for_col->assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    total += square.at(p[j] - 1, j - 1);
    if (row_for_col != nullptr) (*row_for_col)[j - 1] = p[j] - 1;
  }
  return total;
}

MatchAssignment hungarian_match(const CostMatrix& cost) {
  if (cost.values.size() != cost.rows * cost.cols) throw ContractError("hungarian_match: malformed cost matrix");
  if (cost.rows < cost.cols)
    throw ContractError("hungarian_match: " + std::to_string(cost.rows) + " queries cannot cover " +
                        std::to_string(cost.cols) + " truths");
  for (double c : cost.values)
    if (!std::isfinite(c)) throw ContractError("hungarian_match: non-finite cost");

  MatchAssignment out;
  const std::size_t nq = cost.rows, nt = cost.cols;
  std::vector<std::size_t> queries(nq), truths(nt);
  for (std::size_t i = 0; i < nq; ++i) queries[i] = i;
  for (std::size_t j = 0; j < nt; ++j) truths[j] = j;

  double scale = 1.0;
  for (double c : cost.values) scale = std::max(scale, std::abs(c));
  const double tol = 1e-10 * scale * static_cast<double>(nt + 1);

  // Fix truths in order, each to the smallest query index that still admits
  // an optimal completion.
  double remaining = sub_problem_cost(cost, queries, truths);
  std::vector<bool> taken(nq, false);
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<std::size_t> rest_truths(truths.begin() + static_cast<std::ptrdiff_t>(j + 1), truths.end());
    bool fixed = false;
    for (std::size_t q = 0; q < nq && !fixed; ++q) {
      if (taken[q]) continue;
      std::vector<std::size_t> rest_queries;
      for (std::size_t r = 0; r < nq; ++r)
        if (!taken[r] && r != q) rest_queries.push_back(r);
      const double completion = sub_problem_cost(cost, rest_queries, rest_truths);
      if (cost.at(q, j) + completion <= remaining + tol) {
        out.pairs.emplace_back(q, j);
        taken[q] = true;
        remaining = completion;
        fixed = true;
      }
    }
    if (!fixed) throw StateError("hungarian_match: failed to reconstruct an optimal assignment");
  }
  for (const auto& [q, j] : out.pairs) out.total_cost += cost.at(q, j);
  for (std::size_t q = 0; q < nq; ++q)
    if (!taken[q]) out.unmatched_queries.push_back(q);
  return out;
}

}  // namespace textvpr::training
