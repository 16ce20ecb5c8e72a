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

// Intruder posteriors over the confidential attribute for three disclosure
// control techniques: releasing a random sample, answering exact range-sum
// queries of a fixed size, and releasing a dataset with additive binomial
// noise. Each posterior is a ValueDistribution over the confidential domain D
// that can be fed to ComputeRiskReport.
//
// Notation used below: M_o is the set of original records matching the
// intruder's supplementary knowledge (SK), M_s the matching records of a
// released sample, and D the rounded domain of the confidential attribute.

#ifndef CAE_ATTACK_MODELS_H_
#define CAE_ATTACK_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "cae/dataset.h"
#include "cae/linprog.h"
#include "cae/value_distribution.h"

namespace cae {

struct SupplementaryKnowledge {
  // Exact values of some non-confidential attributes of the target.
  KnownValues known;
  // |M_o|, assumed known to the intruder. Only the sampling posterior reads
  // it; the other techniques work on the original matches directly.
  size_t original_match_count = 0;
};

// Simple random sample without replacement of floor(n * factor / 100)
// records, kept in original order. Requires 0 < factor <= 100 and a non-empty
// result.
absl::StatusOr<Dataset> DrawSample(const Dataset& dataset,
                                   double factor_percent, Rng& rng);

// p_i = f_i / |M_o| + ((|M_o| - |M_s|) / |M_o|) / |D|, where f_i counts d_i
// among the confidential values of M_s: the target is one of the matching
// sample records, or else missing from the sample with any value of D equally
// likely. NotFound if |M_o| = 0; InvalidArgument if |M_s| > |M_o|.
absl::StatusOr<ValueDistribution> SamplingPosterior(
    const Dataset& sample, const SupplementaryKnowledge& sk,
    std::span<const int64_t> domain);

// A query-restricted release: exact answers to overlapping range-sum queries
// over a secret shuffle of the records.
struct QueryRelease {
  QuerySystem system;
  // position_of_record[r] is the unknown that holds record r's value.
  std::vector<size_t> position_of_record;
};

// Shuffles the records and answers k = floor(2n / q) - 1 queries, each summing
// the confidential values of q consecutive shuffled positions, with stride
// q / 2. Positions past the last window are covered only by the box
// [min D, max D]. Requires an even q with 2 <= q <= n.
absl::StatusOr<QueryRelease> BuildQuerySystem(const Dataset& dataset,
                                              size_t query_size, Rng& rng);

// For every record r in M_o with LP bounds [L, U], spreads 1 / |M_o| evenly
// over the domain values inside [L, U].
absl::StatusOr<ValueDistribution> QueryRestrictionPosterior(
    const QueryRelease& release, const Dataset& dataset,
    const SupplementaryKnowledge& sk, std::span<const int64_t> domain);

// Same as QueryRestrictionPosterior with bounds precomputed for every record
// (indexed by record, not by position).
absl::StatusOr<ValueDistribution> QueryRestrictionPosteriorFromBounds(
    std::span<const Bounds> record_bounds, const Dataset& dataset,
    const SupplementaryKnowledge& sk, std::span<const int64_t> domain);

// Binomial noise magnitude for one attribute.
struct AttributeNoise {
  // Maximum noise M in domain steps; noise is (B - M/2) * step with
  // B ~ Binomial(M, 1/2).
  int64_t max_noise = 0;
  int64_t step = 1;
};

struct NoiseSpec {
  double percent = 0.0;
  std::vector<AttributeNoise> attributes;
};

// percent% of (domain_size - 1), rounded to the nearest even integer with
// ties rounding up.
int64_t MaxNoise(double percent, int64_t domain_size);

// Noise for every attribute of `schema` at `percent`, each sized from its own
// domain and stepping by its rounding granule. Requires 0 <= percent.
absl::StatusOr<NoiseSpec> MakeNoiseSpec(const Schema& schema, double percent);

// C(m, offset + m/2) / 2^m; zero outside the support or for odd m.
double CenteredBinomialPmf(int64_t m, int64_t offset);

// Adds independent centered binomial noise to every cell. Values are not
// clamped to the attribute range.
absl::StatusOr<Dataset> PerturbDataset(const Dataset& dataset,
                                       const NoiseSpec& spec, Rng& rng);

// Soft matching against a perturbed release. Record r gets weight
// w_r = prod_a Pr(noise = r.a - sk[a]) over the known attributes and
// contributes w_r * Pr(noise = r.confidential - d_i) to each d_i in D.
// NotFound when no record has positive weight.
absl::StatusOr<ValueDistribution> NoisePosterior(
    const Dataset& perturbed, const SupplementaryKnowledge& sk,
    const NoiseSpec& spec, std::span<const int64_t> domain);

}  // namespace cae

#endif  // CAE_ATTACK_MODELS_H_
