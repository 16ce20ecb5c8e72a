// Copyright 2026 The CAE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bounds on individual unknowns of a system of exact range-sum answers.
//
// An intruder who has seen the answers sum(x[begin..begin+length)) = s for a
// set of ranges, and who knows every unknown lies in [d_min, d_max], can bound
// each unknown by minimizing and maximizing it over the feasible polytope.
//
// Two exact solvers are provided:
//
//  * BoundsSolver rewrites the system over prefix sums S_i = x_0 + ... +
//    x_{i-1}. Every range equation and every box constraint becomes a
//    difference constraint S_a - S_b <= c, so the extreme values of
//    x_v = S_{v+1} - S_v are shortest-path distances in the constraint graph.
//    Feasibility is a negative-cycle check. Results are exact integers.
//
//  * MinimizeBoundedSimplex is a general bounded-variable primal simplex for
//    min c.x subject to A x = b, l <= x <= u. VariableBoundsSimplex applies it
//    to a QuerySystem and serves as an independent second route.

#ifndef CAE_LINPROG_H_
#define CAE_LINPROG_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace cae {

// Results within this distance of an integer are snapped to it.
inline constexpr double kIntegerSnapTolerance = 1e-6;

// sum of x[begin], ..., x[begin + length - 1] equals `sum`.
struct RangeEquation {
  size_t begin = 0;
  size_t length = 0;
  int64_t sum = 0;
};

class QuerySystem {
 public:
  // Fails if a range is empty or out of bounds, if lower > upper, or if an
  // answer lies outside [length * lower, length * upper].
  static absl::StatusOr<QuerySystem> Create(size_t num_vars,
                                            std::vector<RangeEquation> equations,
                                            int64_t lower, int64_t upper);

  size_t num_vars() const { return num_vars_; }
  const std::vector<RangeEquation>& equations() const { return equations_; }
  int64_t lower() const { return lower_; }
  int64_t upper() const { return upper_; }

 private:
  QuerySystem(size_t num_vars, std::vector<RangeEquation> equations,
              int64_t lower, int64_t upper)
      : num_vars_(num_vars),
        equations_(std::move(equations)),
        lower_(lower),
        upper_(upper) {}

  size_t num_vars_;
  std::vector<RangeEquation> equations_;
  int64_t lower_;
  int64_t upper_;
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Precomputes a feasible potential for the system's constraint graph once and
// then answers per-variable bound queries with Dijkstra. Immutable after
// construction; Solve may be called concurrently.
class BoundsSolver {
 public:
  // FailedPrecondition if the system is infeasible.
  static absl::StatusOr<BoundsSolver> Create(const QuerySystem& system);

  // Exact LP minimum and maximum of variable `var`. Requires var < num_vars.
  Bounds Solve(size_t var) const;

  // Solve() for every variable.
  std::vector<Bounds> SolveAll() const;

 private:
  struct Edge {
    size_t to;
    int64_t weight;
  };

  BoundsSolver() = default;

  // Shortest-path distance from `source` to `target`.
  int64_t Distance(size_t source, size_t target) const;

  std::vector<std::vector<Edge>> adjacency_;
  std::vector<int64_t> potential_;
};

// Convenience wrapper: BoundsSolver::Create(system)->Solve(var).
absl::StatusOr<Bounds> VariableBounds(const QuerySystem& system, size_t var);

// min objective . x  subject to  rows x = rhs,  lower <= x <= upper.
// Every bound must be finite.
struct LinearProgram {
  size_t num_vars = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;
};

struct LpSolution {
  double objective = 0.0;
  std::vector<double> x;
};

// Two-phase bounded-variable primal simplex with Bland's rule. Returns
// FailedPrecondition if infeasible and InvalidArgument for malformed input.
absl::StatusOr<LpSolution> MinimizeBoundedSimplex(const LinearProgram& lp);

// Bounds of one variable of a QuerySystem computed with two simplex solves.
absl::StatusOr<Bounds> VariableBoundsSimplex(const QuerySystem& system,
                                             size_t var);

}  // namespace cae

#endif  // CAE_LINPROG_H_
