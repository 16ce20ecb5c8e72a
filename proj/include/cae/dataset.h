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

// Integer-coded microdata tables with exactly one confidential attribute.

#ifndef CAE_DATASET_H_
#define CAE_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace cae {

// All stochastic operations take this engine, seeded by the caller.
using Rng = std::mt19937_64;

enum class AttributeKind { kCategorical, kNumericalInteger };

struct AttributeSchema {
  std::string name;
  int64_t min = 0;
  int64_t max = 0;
  AttributeKind kind = AttributeKind::kNumericalInteger;
  // Values are stored as multiples of this granule; 1 means no rounding.
  int64_t rounding = 1;
  bool confidential = false;

  // Representable values after rounding, ascending.
  std::vector<int64_t> DomainValues() const;
  // |D|.
  int64_t DomainSize() const;
};

class Schema {
 public:
  // Requires at least one attribute, unique names, min <= max, rounding >= 1,
  // a non-empty rounded domain and exactly one confidential attribute.
  static absl::StatusOr<Schema> Create(std::vector<AttributeSchema> attributes);

  const std::vector<AttributeSchema>& attributes() const { return attributes_; }
  size_t size() const { return attributes_.size(); }
  const AttributeSchema& attribute(size_t i) const { return attributes_[i]; }
  size_t confidential_index() const { return confidential_; }
  const AttributeSchema& confidential() const {
    return attributes_[confidential_];
  }
  // Indices of the non-confidential attributes in schema order.
  std::vector<size_t> QuasiIdentifiers() const;
  // Index of the attribute called `name`, or NotFound.
  absl::StatusOr<size_t> IndexOf(absl::string_view name) const;

 private:
  Schema(std::vector<AttributeSchema> attributes, size_t confidential)
      : attributes_(std::move(attributes)), confidential_(confidential) {}

  std::vector<AttributeSchema> attributes_;
  size_t confidential_;
};

// The seven attributes selected from the 2006 Illinois PUMS extract, with the
// rounded Salary attribute (10..250 in steps of 10) confidential.
Schema PumsSchema();

// Parses a schema file made of `[attribute]` sections with keys name, min,
// max, kind (categorical | numerical), rounding and confidential.
absl::StatusOr<Schema> ParseSchema(absl::string_view text);
absl::StatusOr<Schema> LoadSchema(const std::string& path);

class Dataset {
 public:
  // Validates that every row has one cell per attribute, that there is at
  // least one row, and (unless `allow_out_of_range`) that every cell lies in
  // its attribute's [min, max]. Perturbed releases set `allow_out_of_range`.
  static absl::StatusOr<Dataset> Create(Schema schema,
                                        std::vector<std::vector<int64_t>> rows,
                                        bool allow_out_of_range = false);

  const Schema& schema() const { return schema_; }
  size_t num_records() const { return rows_.size(); }
  const std::vector<int64_t>& record(size_t i) const { return rows_[i]; }
  int64_t cell(size_t row, size_t attribute) const {
    return rows_[row][attribute];
  }
  int64_t confidential_value(size_t row) const {
    return rows_[row][schema_.confidential_index()];
  }
  const std::vector<std::vector<int64_t>>& rows() const { return rows_; }

 private:
  Dataset(Schema schema, std::vector<std::vector<int64_t>> rows)
      : schema_(std::move(schema)), rows_(std::move(rows)) {}

  Schema schema_;
  std::vector<std::vector<int64_t>> rows_;
};

// Nearest multiple of `granularity`, ties away from zero. Requires
// granularity >= 1.
int64_t RoundValue(int64_t value, int64_t granularity);

// Reads a comma-separated file whose header names every schema attribute
// (extra columns are ignored). Cells are rounded per schema and range
// checked. Errors name the offending row and column.
absl::StatusOr<Dataset> ParseCsv(absl::string_view text, const Schema& schema);
absl::StatusOr<Dataset> LoadCsv(const std::string& path, const Schema& schema);

std::string FormatCsv(const Dataset& dataset);
absl::Status WriteCsv(const Dataset& dataset, const std::string& path);

struct SyntheticOptions {
  // Draw the confidential attribute from a right-skewed distribution
  // (probability proportional to 1 / (rank + 1)) instead of uniformly.
  bool skew_confidential = false;
};

// `num_records` rows, each attribute drawn independently over its rounded
// domain. Reproducible for a given engine state.
Dataset GenerateSynthetic(const Schema& schema, size_t num_records, Rng& rng,
                          const SyntheticOptions& options = {});

// Attribute name -> exact value known about the target individual.
using KnownValues = std::map<std::string, int64_t>;

// Rows equal to `known` on every listed attribute. NotFound for an unknown
// attribute name; InvalidArgument if the confidential attribute is listed.
absl::StatusOr<std::vector<size_t>> MatchRecords(const Dataset& dataset,
                                                 const KnownValues& known);

}  // namespace cae

#endif  // CAE_DATASET_H_
