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

// Confidential attribute equivocation (CAE): the intruder's remaining
// uncertainty about a confidential value as a function of the approximate
// compromise range epsilon.
//
// For a candidate distribution x_1 < ... < x_n with probabilities p_i, H(eps)
// is the smallest Shannon entropy obtainable by grouping the values into
// contiguous blocks whose span (last - first) is at most eps, where each block
// is replaced by a single outcome carrying the summed probability. H(0) is the
// ordinary Shannon entropy (H0) and H(eps) reaches 0 at eps_max = x_n - x_1.
// The area under H over [0, eps_max] summarizes resistance to approximate
// compromise. All entropies are in bits.

#ifndef CAE_ENTROPY_H_
#define CAE_ENTROPY_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "cae/value_distribution.h"

namespace cae {

// Largest distribution size accepted by BruteForceMinEntropy by default.
inline constexpr size_t kDefaultOracleCap = 16;

// A grouping of the sorted values into contiguous blocks. `block_ends` holds
// the exclusive end index of every block in order; the last entry equals the
// number of values.
struct Partition {
  std::vector<size_t> block_ends;
};

// H(eps) sampled on the integer grid eps = 0..epsilon_max.
struct EntropyCurve {
  int64_t epsilon_max = 0;
  std::vector<double> h;
};

struct RiskReport {
  double h0 = 0.0;
  double area = 0.0;
  int64_t epsilon_max = 0;
};

// -sum p log2 p.
double ShannonEntropy(const ValueDistribution& dist);

// Minimum entropy over all partitions whose blocks span at most `epsilon`.
// Negative epsilon is an InvalidArgument error.
absl::StatusOr<double> MinEntropyAt(const ValueDistribution& dist,
                                    int64_t epsilon);

// The partition achieving MinEntropyAt. Among equally good final blocks the
// widest one is taken, so the result is deterministic.
absl::StatusOr<Partition> OptimalPartition(const ValueDistribution& dist,
                                           int64_t epsilon);

// Entropy of the merged block probabilities of `partition`.
double PartitionEntropy(const ValueDistribution& dist,
                        const Partition& partition);

// Exhaustive search over all 2^(n-1) contiguous partitions. Refuses
// (FailedPrecondition) when the distribution has more than `cap` values.
absl::StatusOr<double> BruteForceMinEntropy(const ValueDistribution& dist,
                                            int64_t epsilon,
                                            size_t cap = kDefaultOracleCap);

EntropyCurve ComputeEntropyCurve(const ValueDistribution& dist);

// x_n - x_1: the smallest epsilon at which H drops to zero.
int64_t EpsilonMax(const ValueDistribution& dist);

// Integral of the step function H over [0, epsilon_max].
double Area(const EntropyCurve& curve);

RiskReport ComputeRiskReport(const ValueDistribution& dist);

}  // namespace cae

#endif  // CAE_ENTROPY_H_
