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

#include "cae/value_distribution.h"

#include <cmath>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace cae {

absl::StatusOr<ValueDistribution> ValueDistribution::Create(
    std::vector<int64_t> values, std::vector<double> probs) {
  if (values.empty()) {
    return absl::InvalidArgumentError("distribution must not be empty");
  }
  if (values.size() != probs.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("got %d values but %d probabilities", values.size(),
                        probs.size()));
  }
  double total = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && values[i - 1] >= values[i]) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "values must be strictly increasing (index %d: %d after %d)", i,
          values[i], values[i - 1]));
    }
    if (!std::isfinite(probs[i]) || probs[i] <= 0.0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "probability of value %d must be finite and positive, got %g",
          values[i], probs[i]));
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("probabilities sum to %.12f, expected 1", total));
  }
  return ValueDistribution(std::move(values), std::move(probs));
}

absl::StatusOr<ValueDistribution> ValueDistribution::FromWeights(
    std::span<const std::pair<int64_t, double>> weighted) {
  std::map<int64_t, double> merged;
  double total = 0.0;
  for (const auto& [value, weight] : weighted) {
    if (!std::isfinite(weight) || weight < 0.0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "weight of value %d must be finite and non-negative, got %g", value,
          weight));
    }
    if (weight == 0.0) continue;
    merged[value] += weight;
    total += weight;
  }
  if (merged.empty() || total <= 0.0) {
    return absl::InvalidArgumentError("all weights are zero");
  }
  std::vector<int64_t> values;
  std::vector<double> probs;
  values.reserve(merged.size());
  probs.reserve(merged.size());
  for (const auto& [value, weight] : merged) {
    values.push_back(value);
    probs.push_back(weight / total);
  }
  return ValueDistribution(std::move(values), std::move(probs));
}

ValueDistribution ValueDistribution::PointMass(int64_t value) {
  return ValueDistribution({value}, {1.0});
}

}  // namespace cae
