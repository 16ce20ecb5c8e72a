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

#include "cae/linprog.h"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace cae {
namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kFeasibilityTolerance = 1e-7;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

double SnapToInteger(double v) {
  const double r = std::round(v);
  return std::abs(v - r) <= kIntegerSnapTolerance ? r : v;
}

enum class VarState { kAtLower, kAtUpper, kBasic };

// Dense tableau over the shifted variables y = x - lower, 0 <= y <= width,
// followed by one artificial column per row.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp)
      : m_(lp.rows.size()), n_(lp.num_vars), total_(n_ + m_) {
    tableau_.assign(m_, std::vector<double>(total_, 0.0));
    beta_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    width_.assign(total_, kInfinity);
    state_.assign(total_, VarState::kAtLower);
    for (size_t j = 0; j < n_; ++j) width_[j] = lp.upper[j] - lp.lower[j];
    for (size_t i = 0; i < m_; ++i) {
      double rhs = lp.rhs[i];
      for (size_t j = 0; j < n_; ++j) rhs -= lp.rows[i][j] * lp.lower[j];
      const double sign = rhs < 0.0 ? -1.0 : 1.0;
      for (size_t j = 0; j < n_; ++j) tableau_[i][j] = sign * lp.rows[i][j];
      tableau_[i][n_ + i] = 1.0;
      beta_[i] = sign * rhs;
      basis_[i] = n_ + i;
      state_[n_ + i] = VarState::kBasic;
    }
  }

  // Runs phase 1. Returns false if the program is infeasible.
  absl::StatusOr<bool> FindFeasibleBasis() {
    std::vector<double> cost(total_, 0.0);
    for (size_t i = 0; i < m_; ++i) cost[n_ + i] = 1.0;
    if (auto status = Optimize(cost, /*allow_artificial=*/true); !status.ok()) {
      return status;
    }
    double infeasibility = 0.0;
    for (size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeasibility += beta_[i];
    }
    if (infeasibility > kFeasibilityTolerance) return false;

    // Swap remaining zero-level artificials for structural columns. A row
    // with no structural entry left is redundant and keeps its artificial.
    for (size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      for (size_t j = 0; j < n_; ++j) {
        if (state_[j] != VarState::kBasic &&
            std::abs(tableau_[r][j]) > kPivotTolerance) {
          const double value = state_[j] == VarState::kAtUpper ? width_[j] : 0;
          state_[basis_[r]] = VarState::kAtLower;
          Pivot(r, j);
          beta_[r] = value;
          break;
        }
      }
    }
    for (size_t i = 0; i < m_; ++i) width_[n_ + i] = 0.0;
    return true;
  }

  absl::Status Minimize(const std::vector<double>& objective) {
    std::vector<double> cost(total_, 0.0);
    for (size_t j = 0; j < n_; ++j) cost[j] = objective[j];
    return Optimize(cost, /*allow_artificial=*/false);
  }

  // Value of shifted structural variable j.
  double Value(size_t j) const {
    if (state_[j] == VarState::kAtUpper) return width_[j];
    if (state_[j] == VarState::kAtLower) return 0.0;
    for (size_t i = 0; i < m_; ++i) {
      if (basis_[i] == j) return beta_[i];
    }
    return 0.0;
  }

 private:
  absl::Status Optimize(const std::vector<double>& cost,
                        bool allow_artificial) {
    const size_t max_iterations = 50 * (m_ + total_) + 1000;
    const size_t candidates = allow_artificial ? total_ : n_;
    for (size_t iter = 0; iter < max_iterations; ++iter) {
      // Bland's rule: first column whose reduced cost improves the objective
      // in the direction its bound allows.
      size_t entering = total_;
      double direction = 0.0;
      for (size_t j = 0; j < candidates; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        double reduced = cost[j];
        for (size_t i = 0; i < m_; ++i) {
          reduced -= cost[basis_[i]] * tableau_[i][j];
        }
        if (state_[j] == VarState::kAtLower && reduced < -kPivotTolerance &&
            width_[j] > 0.0) {
          entering = j;
          direction = 1.0;
          break;
        }
        if (state_[j] == VarState::kAtUpper && reduced > kPivotTolerance) {
          entering = j;
          direction = -1.0;
          break;
        }
      }
      if (entering == total_) return absl::OkStatus();

      double step = width_[entering];
      size_t leaving_row = m_;
      for (size_t i = 0; i < m_; ++i) {
        const double alpha = direction * tableau_[i][entering];
        double limit = kInfinity;
        if (alpha > kPivotTolerance) {
          limit = std::max(beta_[i], 0.0) / alpha;
        } else if (alpha < -kPivotTolerance && width_[basis_[i]] < kInfinity) {
          limit = std::max(width_[basis_[i]] - beta_[i], 0.0) / -alpha;
        }
        if (limit < step || (limit == step && leaving_row < m_ &&
                             basis_[i] < basis_[leaving_row])) {
          step = limit;
          leaving_row = i;
        }
      }
      if (step == kInfinity) {
        return absl::OutOfRangeError("linear program is unbounded");
      }

      for (size_t i = 0; i < m_; ++i) {
        beta_[i] -= direction * tableau_[i][entering] * step;
      }
      if (leaving_row == m_) {
        state_[entering] = state_[entering] == VarState::kAtLower
                               ? VarState::kAtUpper
                               : VarState::kAtLower;
        continue;
      }
      const double entering_value =
          state_[entering] == VarState::kAtLower ? step
                                                 : width_[entering] - step;
      const double alpha = direction * tableau_[leaving_row][entering];
      state_[basis_[leaving_row]] =
          alpha > 0.0 ? VarState::kAtLower : VarState::kAtUpper;
      Pivot(leaving_row, entering);
      beta_[leaving_row] = entering_value;
    }
    return absl::InternalError("simplex iteration limit reached");
  }

  void Pivot(size_t row, size_t col) {
    std::vector<double>& pivot_row = tableau_[row];
    const double pivot = pivot_row[col];
    for (double& v : pivot_row) v /= pivot;
    for (size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double factor = tableau_[i][col];
      if (factor == 0.0) continue;
      for (size_t j = 0; j < total_; ++j) {
        tableau_[i][j] -= factor * pivot_row[j];
      }
    }
    basis_[row] = col;
    state_[col] = VarState::kBasic;
  }

  size_t m_;
  size_t n_;
  size_t total_;
  std::vector<std::vector<double>> tableau_;
  std::vector<double> beta_;
  std::vector<size_t> basis_;
  std::vector<double> width_;
  std::vector<VarState> state_;
};

absl::Status ValidateProgram(const LinearProgram& lp) {
  if (lp.rhs.size() != lp.rows.size()) {
    return absl::InvalidArgumentError("rows and rhs differ in length");
  }
  for (const auto& row : lp.rows) {
    if (row.size() != lp.num_vars) {
      return absl::InvalidArgumentError("constraint row has wrong width");
    }
  }
  if (lp.lower.size() != lp.num_vars || lp.upper.size() != lp.num_vars ||
      lp.objective.size() != lp.num_vars) {
    return absl::InvalidArgumentError("bound or objective size mismatch");
  }
  for (size_t j = 0; j < lp.num_vars; ++j) {
    if (!std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j])) {
      return absl::InvalidArgumentError("variable bounds must be finite");
    }
    if (lp.lower[j] > lp.upper[j]) {
      return absl::FailedPreconditionError(
          absl::StrFormat("variable %d has empty box", j));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<QuerySystem> QuerySystem::Create(
    size_t num_vars, std::vector<RangeEquation> equations, int64_t lower,
    int64_t upper) {
  if (lower > upper) {
    return absl::InvalidArgumentError(
        absl::StrFormat("box [%d, %d] is empty", lower, upper));
  }
  for (size_t e = 0; e < equations.size(); ++e) {
    const RangeEquation& eq = equations[e];
    if (eq.length == 0 || eq.begin + eq.length > num_vars) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "equation %d covers [%d, %d) outside %d unknowns", e, eq.begin,
          eq.begin + eq.length, num_vars));
    }
    const int64_t len = static_cast<int64_t>(eq.length);
    if (eq.sum < len * lower || eq.sum > len * upper) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "equation %d answer %d outside [%d, %d]", e, eq.sum, len * lower,
          len * upper));
    }
  }
  return QuerySystem(num_vars, std::move(equations), lower, upper);
}

absl::StatusOr<BoundsSolver> BoundsSolver::Create(const QuerySystem& system) {
  const size_t n = system.num_vars();
  BoundsSolver solver;
  // Edge u -> v with weight c encodes S_v - S_u <= c.
  solver.adjacency_.assign(n + 1, {});
  for (size_t i = 0; i < n; ++i) {
    solver.adjacency_[i].push_back({i + 1, system.upper()});
    solver.adjacency_[i + 1].push_back({i, -system.lower()});
  }
  for (const RangeEquation& eq : system.equations()) {
    const size_t a = eq.begin;
    const size_t b = eq.begin + eq.length;
    solver.adjacency_[a].push_back({b, eq.sum});
    solver.adjacency_[b].push_back({a, -eq.sum});
  }

  // Bellman-Ford from a virtual source joined to every node at weight 0.
  solver.potential_.assign(n + 1, 0);
  bool changed = true;
  for (size_t pass = 0; pass <= n + 1 && changed; ++pass) {
    changed = false;
    for (size_t u = 0; u <= n; ++u) {
      for (const Edge& e : solver.adjacency_[u]) {
        if (solver.potential_[u] + e.weight < solver.potential_[e.to]) {
          solver.potential_[e.to] = solver.potential_[u] + e.weight;
          changed = true;
        }
      }
    }
  }
  if (changed) {
    return absl::FailedPreconditionError(
        "query system is infeasible (inconsistent answers)");
  }
  return solver;
}

int64_t BoundsSolver::Distance(size_t source, size_t target) const {
  // Reduced weights w + pi(u) - pi(v) are non-negative for a feasible
  // potential, so Dijkstra applies.
  constexpr int64_t kUnreached = std::numeric_limits<int64_t>::max();
  std::vector<int64_t> dist(adjacency_.size(), kUnreached);
  using Entry = std::pair<int64_t, size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[source] = 0;
  frontier.push({0, source});
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d != dist[u]) continue;
    if (u == target) break;
    for (const Edge& e : adjacency_[u]) {
      const int64_t nd = d + e.weight + potential_[u] - potential_[e.to];
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        frontier.push({nd, e.to});
      }
    }
  }
  return dist[target] - potential_[source] + potential_[target];
}

Bounds BoundsSolver::Solve(size_t var) const {
  // x_var = S_{var+1} - S_var.
  return Bounds{.lower = static_cast<double>(-Distance(var + 1, var)),
                .upper = static_cast<double>(Distance(var, var + 1))};
}

std::vector<Bounds> BoundsSolver::SolveAll() const {
  std::vector<Bounds> all;
  all.reserve(adjacency_.size() - 1);
  for (size_t v = 0; v + 1 < adjacency_.size(); ++v) all.push_back(Solve(v));
  return all;
}

absl::StatusOr<Bounds> VariableBounds(const QuerySystem& system, size_t var) {
  if (var >= system.num_vars()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "variable %d out of range (%d unknowns)", var, system.num_vars()));
  }
  auto solver = BoundsSolver::Create(system);
  if (!solver.ok()) return solver.status();
  return solver->Solve(var);
}

absl::StatusOr<LpSolution> MinimizeBoundedSimplex(const LinearProgram& lp) {
  if (auto status = ValidateProgram(lp); !status.ok()) return status;
  BoundedSimplex simplex(lp);
  auto feasible = simplex.FindFeasibleBasis();
  if (!feasible.ok()) return feasible.status();
  if (!*feasible) {
    return absl::FailedPreconditionError("linear program is infeasible");
  }
  if (auto status = simplex.Minimize(lp.objective); !status.ok()) {
    return status;
  }
  LpSolution solution;
  solution.x.resize(lp.num_vars);
  for (size_t j = 0; j < lp.num_vars; ++j) {
    solution.x[j] = lp.lower[j] + simplex.Value(j);
    solution.objective += lp.objective[j] * solution.x[j];
  }
  return solution;
}

absl::StatusOr<Bounds> VariableBoundsSimplex(const QuerySystem& system,
                                             size_t var) {
  const size_t n = system.num_vars();
  if (var >= n) {
    return absl::InvalidArgumentError(
        absl::StrFormat("variable %d out of range (%d unknowns)", var, n));
  }
  LinearProgram lp;
  lp.num_vars = n;
  lp.lower.assign(n, static_cast<double>(system.lower()));
  lp.upper.assign(n, static_cast<double>(system.upper()));
  for (const RangeEquation& eq : system.equations()) {
    std::vector<double> row(n, 0.0);
    for (size_t k = eq.begin; k < eq.begin + eq.length; ++k) row[k] = 1.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(static_cast<double>(eq.sum));
  }
  lp.objective.assign(n, 0.0);
  lp.objective[var] = 1.0;
  auto lo = MinimizeBoundedSimplex(lp);
  if (!lo.ok()) return lo.status();
  lp.objective[var] = -1.0;
  auto hi = MinimizeBoundedSimplex(lp);
  if (!hi.ok()) return hi.status();
  return Bounds{.lower = SnapToInteger(lo->x[var]),
                .upper = SnapToInteger(hi->x[var])};
}

}  // namespace cae
