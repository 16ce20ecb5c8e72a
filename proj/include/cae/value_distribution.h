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

#ifndef CAE_VALUE_DISTRIBUTION_H_
#define CAE_VALUE_DISTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace cae {

// Maximum allowed deviation of the probability total from 1.
inline constexpr double kProbabilitySumTolerance = 1e-9;

// A finite distribution over integer-coded candidate values of a confidential
// attribute. Values are strictly increasing and every probability is positive;
// instances can only be obtained through the validating factories below.
class ValueDistribution {
 public:
  // Validates and wraps already-normalized data. Fails if the input is empty,
  // the lengths differ, values are not strictly increasing, a probability is
  // not finite and positive, or the total deviates from 1 by more than
  // kProbabilitySumTolerance.
  static absl::StatusOr<ValueDistribution> Create(std::vector<int64_t> values,
                                                  std::vector<double> probs);

  // Builds a distribution from unnormalized (value, weight) pairs in any
  // order. Duplicate values are merged, zero weights dropped, and the result
  // normalized. Negative or non-finite weights, or a zero total, are errors.
  static absl::StatusOr<ValueDistribution> FromWeights(
      std::span<const std::pair<int64_t, double>> weighted);

  // Point mass on `value`.
  static ValueDistribution PointMass(int64_t value);

  std::span<const int64_t> values() const { return values_; }
  std::span<const double> probs() const { return probs_; }
  size_t size() const { return values_.size(); }

  // x_n - x_1.
  int64_t span() const { return values_.back() - values_.front(); }

 private:
  ValueDistribution(std::vector<int64_t> values, std::vector<double> probs)
      : values_(std::move(values)), probs_(std::move(probs)) {}

  std::vector<int64_t> values_;
  std::vector<double> probs_;
};

}  // namespace cae

#endif  // CAE_VALUE_DISTRIBUTION_H_
