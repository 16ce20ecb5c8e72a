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

#include "cae/entropy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace cae {
namespace {

// q * log2(1 / q) for a merged block probability.
double BlockTerm(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log2(q);
}

// Minimum-entropy DP over prefixes: best[i] is the optimum for the first i
// values, and the last block of that optimum starts at start[i - 1]. When
// `starts` is null only the value is computed.
double SolveWindowedDp(const ValueDistribution& dist, int64_t epsilon,
                       std::vector<size_t>* starts) {
  const auto values = dist.values();
  const auto probs = dist.probs();
  const size_t n = dist.size();
  std::vector<double> best(n + 1, 0.0);
  if (starts != nullptr) starts->assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    double block_prob = 0.0;
    double best_here = std::numeric_limits<double>::infinity();
    size_t best_start = i;
    // Grow the final block leftwards while it still fits in the window. The
    // `<=` keeps the smallest start among ties.
    for (size_t j = i + 1; j-- > 0;) {
      if (values[i] - values[j] > epsilon) break;
      block_prob += probs[j];
      const double candidate = best[j] + BlockTerm(block_prob);
      if (candidate <= best_here) {
        best_here = candidate;
        best_start = j;
      }
    }
    best[i + 1] = best_here;
    if (starts != nullptr) (*starts)[i] = best_start;
  }
  return best[n];
}

absl::Status ValidateEpsilon(int64_t epsilon) {
  if (epsilon < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be non-negative, got %d", epsilon));
  }
  return absl::OkStatus();
}

}  // namespace

double ShannonEntropy(const ValueDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probs()) h += BlockTerm(p);
  return h;
}

absl::StatusOr<double> MinEntropyAt(const ValueDistribution& dist,
                                    int64_t epsilon) {
  if (auto status = ValidateEpsilon(epsilon); !status.ok()) return status;
  if (epsilon >= dist.span()) return 0.0;
  return SolveWindowedDp(dist, epsilon, nullptr);
}

absl::StatusOr<Partition> OptimalPartition(const ValueDistribution& dist,
                                           int64_t epsilon) {
  if (auto status = ValidateEpsilon(epsilon); !status.ok()) return status;
  std::vector<size_t> starts;
  SolveWindowedDp(dist, epsilon, &starts);
  Partition partition;
  for (size_t end = dist.size(); end > 0; end = starts[end - 1]) {
    partition.block_ends.push_back(end);
  }
  std::reverse(partition.block_ends.begin(), partition.block_ends.end());
  return partition;
}

double PartitionEntropy(const ValueDistribution& dist,
                        const Partition& partition) {
  const auto probs = dist.probs();
  double h = 0.0;
  size_t begin = 0;
  for (size_t end : partition.block_ends) {
    double q = 0.0;
    for (size_t k = begin; k < end; ++k) q += probs[k];
    h += BlockTerm(q);
    begin = end;
  }
  return h;
}

absl::StatusOr<double> BruteForceMinEntropy(const ValueDistribution& dist,
                                            int64_t epsilon, size_t cap) {
  if (auto status = ValidateEpsilon(epsilon); !status.ok()) return status;
  const size_t n = dist.size();
  if (n > cap) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "refusing exhaustive search over %d values (cap %d)", n, cap));
  }
  const auto values = dist.values();
  const auto probs = dist.probs();
  // Bit k of `cuts` set means a block boundary between value k and k + 1.
  const uint64_t num_masks = uint64_t{1} << (n - 1);
  double best = std::numeric_limits<double>::infinity();
  for (uint64_t cuts = 0; cuts < num_masks; ++cuts) {
    double h = 0.0;
    double q = 0.0;
    size_t block_begin = 0;
    bool feasible = true;
    for (size_t k = 0; k < n; ++k) {
      q += probs[k];
      const bool block_closes = k + 1 == n || ((cuts >> k) & 1) != 0;
      if (!block_closes) continue;
      if (values[k] - values[block_begin] > epsilon) {
        feasible = false;
        break;
      }
      h += BlockTerm(q);
      q = 0.0;
      block_begin = k + 1;
    }
    if (feasible) best = std::min(best, h);
  }
  return best;
}

EntropyCurve ComputeEntropyCurve(const ValueDistribution& dist) {
  EntropyCurve curve;
  curve.epsilon_max = EpsilonMax(dist);
  curve.h.assign(static_cast<size_t>(curve.epsilon_max) + 1, 0.0);
  const auto values = dist.values();
  const size_t n = dist.size();

  // The feasible partitions change only when epsilon reaches a pairwise gap,
  // so H is evaluated at the distinct gaps and held constant in between.
  std::vector<int64_t> breakpoints;
  const uint64_t pair_count = static_cast<uint64_t>(n) * (n - 1) / 2;
  if (pair_count + 1 < curve.h.size()) {
    breakpoints.reserve(pair_count + 1);
    breakpoints.push_back(0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < i; ++j) {
        breakpoints.push_back(values[i] - values[j]);
      }
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                      breakpoints.end());
  } else {
    breakpoints.resize(curve.h.size());
    std::iota(breakpoints.begin(), breakpoints.end(), int64_t{0});
  }

  for (size_t k = 0; k < breakpoints.size(); ++k) {
    const int64_t eps = breakpoints[k];
    if (eps >= curve.epsilon_max) break;
    const int64_t next =
        k + 1 < breakpoints.size() ? breakpoints[k + 1] : curve.epsilon_max;
    const double h = SolveWindowedDp(dist, eps, nullptr);
    std::fill(curve.h.begin() + eps, curve.h.begin() + next, h);
  }
  return curve;
}

int64_t EpsilonMax(const ValueDistribution& dist) { return dist.span(); }

double Area(const EntropyCurve& curve) {
  double area = 0.0;
  for (int64_t eps = 0; eps < curve.epsilon_max; ++eps) {
    area += curve.h[static_cast<size_t>(eps)];
  }
  return area;
}

RiskReport ComputeRiskReport(const ValueDistribution& dist) {
  const EntropyCurve curve = ComputeEntropyCurve(dist);
  return RiskReport{.h0 = ShannonEntropy(dist),
                    .area = Area(curve),
                    .epsilon_max = curve.epsilon_max};
}

}  // namespace cae
