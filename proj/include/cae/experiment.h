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

// Experiment orchestration: sweeps a disclosure control technique over its
// parameter values, replicates and supplementary-knowledge sizes, and averages
// the resulting (H0, area) risk reports.
//
// For each (parameter, replicate) pair the release is built once from an
// engine seeded with base_seed + replicate. Supplementary knowledge is then
// instantiated as chains: a target record plus a random order of its
// quasi-identifiers, with SK size s revealing the first s of them. Chains come
// from a second engine derived from the same seed but independent of the
// release, so every parameter value and every SK size of a replicate is
// evaluated against the same targets.

#ifndef CAE_EXPERIMENT_H_
#define CAE_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "cae/dataset.h"
#include "cae/entropy.h"
#include "cae/value_distribution.h"

namespace cae {

enum class Technique { kSampling, kQueryRestriction, kNoise };

absl::string_view TechniqueName(Technique technique);
absl::StatusOr<Technique> ParseTechnique(absl::string_view name);

// Sampling factors {5, 10, 20, 50}, query set sizes {2, 4, 8, 16, 32}, or
// noise percents {10, 25, 50, 100}.
std::vector<double> DefaultParameters(Technique technique);

struct ExperimentConfig {
  Technique technique = Technique::kSampling;
  std::vector<double> parameters;
  int replicates = 30;
  // Largest SK size swept; negative means every quasi-identifier.
  int sk_sweep = -1;
  uint64_t base_seed = 1;
  // SK chains per replicate; 0 instead pairs every quasi-identifier subset
  // with every record as target.
  size_t instantiation_cap = 64;
  size_t threads = 1;

  // Data source: a CSV file when `csv_path` is set, otherwise a synthetic
  // table of `synthetic_records` rows generated from `dataset_seed`.
  std::string csv_path;
  std::string schema_path;  // empty: the built-in PUMS schema
  size_t synthetic_records = 2500;
  uint64_t dataset_seed = 1;
  bool skew_confidential = false;
};

// Parses the `key = value` experiment file. Keys: technique, parameters
// (comma separated), replicates, sk_sweep, base_seed, instantiation_cap (an
// integer or `all`), threads, dataset (CSV path), schema, synthetic_records,
// dataset_seed, skew_confidential. Unknown keys are errors. Parameters default
// to DefaultParameters(technique).
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// Checks replicate count, SK sweep and the technique-specific parameter
// ranges against a concrete dataset.
absl::Status ValidateConfig(const ExperimentConfig& config,
                            const Dataset& dataset);

// Loads or generates the dataset named by the config.
absl::StatusOr<Dataset> LoadExperimentDataset(const ExperimentConfig& config);

struct ResultRow {
  Technique technique = Technique::kSampling;
  double parameter = 0.0;
  int sk_size = 0;
  double mean_h0 = 0.0;
  double mean_area = 0.0;
  double std_h0 = 0.0;
  double std_area = 0.0;
  int replicates = 0;
  // Evaluated SK instantiations contributing to the means.
  size_t cells = 0;
  // Instantiations whose posterior could not be formed.
  size_t skipped = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

// Rows are ordered by parameter (config order), then SK size.
absl::StatusOr<ResultTable> RunExperiment(const ExperimentConfig& config,
                                          const Dataset& dataset);

// Quasi-identifier subsets of size `size`: all of them when there are at most
// `cap` (or cap is 0), otherwise `cap` distinct subsets drawn at random. Each
// subset lists attribute indices in ascending order.
absl::StatusOr<std::vector<std::vector<size_t>>> SkSubsets(const Schema& schema,
                                                           size_t size,
                                                           Rng& rng,
                                                           size_t cap);

// Columns: technique,parameter,sk_size,mean_h0,mean_area,std_h0,std_area,
// replicates,cells,skipped.
std::string FormatResultCsv(const ResultTable& table);
absl::Status EmitCsv(const ResultTable& table, const std::string& path);

// `epsilon,entropy_bits` rows for eps = 0..epsilon_max.
std::string FormatCurveCsv(const EntropyCurve& curve);
absl::Status EmitCurve(const ValueDistribution& dist, const std::string& path);

// Reads `value,probability` lines (an optional non-numeric header line is
// skipped). Duplicate values are merged and zero probabilities dropped; the
// total must be 1 within 1e-6 and is then renormalized.
absl::StatusOr<ValueDistribution> ParseDistributionCsv(absl::string_view text);
absl::StatusOr<ValueDistribution> LoadDistribution(const std::string& path);

}  // namespace cae

#endif  // CAE_EXPERIMENT_H_
