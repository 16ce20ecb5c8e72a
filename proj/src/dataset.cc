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

#include "cae/dataset.h"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "cae/key_value.h"

namespace cae {
namespace {

int64_t FloorDiv(int64_t a, int64_t b) {
  const int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

int64_t CeilDiv(int64_t a, int64_t b) { return -FloorDiv(-a, b); }

std::vector<absl::string_view> SplitCells(absl::string_view line) {
  std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
  for (auto& cell : cells) cell = absl::StripAsciiWhitespace(cell);
  return cells;
}

}  // namespace

std::vector<int64_t> AttributeSchema::DomainValues() const {
  std::vector<int64_t> values;
  for (int64_t k = CeilDiv(min, rounding); k <= FloorDiv(max, rounding); ++k) {
    values.push_back(k * rounding);
  }
  return values;
}

int64_t AttributeSchema::DomainSize() const {
  return std::max<int64_t>(
      0, FloorDiv(max, rounding) - CeilDiv(min, rounding) + 1);
}

absl::StatusOr<Schema> Schema::Create(
    std::vector<AttributeSchema> attributes) {
  if (attributes.empty()) {
    return absl::InvalidArgumentError("schema has no attributes");
  }
  std::set<std::string> names;
  size_t confidential = attributes.size();
  for (size_t i = 0; i < attributes.size(); ++i) {
    const AttributeSchema& a = attributes[i];
    if (a.name.empty()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("attribute %d has an empty name", i));
    }
    if (!names.insert(a.name).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("duplicate attribute '%s'", a.name));
    }
    if (a.min > a.max) {
      return absl::InvalidArgumentError(
          absl::StrFormat("attribute '%s': min %d > max %d", a.name, a.min,
                          a.max));
    }
    if (a.rounding < 1) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "attribute '%s': rounding must be >= 1", a.name));
    }
    if (a.DomainSize() == 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "attribute '%s': no multiple of %d in [%d, %d]", a.name, a.rounding,
          a.min, a.max));
    }
    if (a.confidential) {
      if (confidential != attributes.size()) {
        return absl::InvalidArgumentError(
            "more than one confidential attribute");
      }
      confidential = i;
    }
  }
  if (confidential == attributes.size()) {
    return absl::InvalidArgumentError("no confidential attribute");
  }
  return Schema(std::move(attributes), confidential);
}

std::vector<size_t> Schema::QuasiIdentifiers() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < attributes_.size(); ++i) {
    if (i != confidential_) out.push_back(i);
  }
  return out;
}

absl::StatusOr<size_t> Schema::IndexOf(absl::string_view name) const {
  for (size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return absl::NotFoundError(absl::StrFormat("no attribute '%s'", name));
}

Schema PumsSchema() {
  using K = AttributeKind;
  auto schema = Schema::Create({
      {"Salary", 10, 250, K::kNumericalInteger, 10, true},
      {"Age", 16, 84, K::kNumericalInteger, 1, false},
      {"Sex", 1, 2, K::kCategorical, 1, false},
      {"Education", 1, 16, K::kCategorical, 1, false},
      {"Industry", 1, 18, K::kCategorical, 1, false},
      {"Occupation", 1, 25, K::kCategorical, 1, false},
      {"WorkTravelTime", 1, 177, K::kNumericalInteger, 1, false},
  });
  return *std::move(schema);
}

absl::StatusOr<Schema> ParseSchema(absl::string_view text) {
  auto sections = ParseKeyValue(text);
  if (!sections.ok()) return sections.status();
  if (!sections->front().entries.empty()) {
    return absl::InvalidArgumentError(
        "schema entries must appear inside [attribute] sections");
  }
  std::vector<AttributeSchema> attributes;
  for (size_t s = 1; s < sections->size(); ++s) {
    const KeyValueSection& section = (*sections)[s];
    if (section.name != "attribute") {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: unknown section [%s]", section.line, section.name));
    }
    AttributeSchema a;
    auto name = section.GetString("name");
    auto min = section.GetInt("min");
    auto max = section.GetInt("max");
    if (!name.ok()) return name.status();
    if (!min.ok()) return min.status();
    if (!max.ok()) return max.status();
    a.name = *name;
    a.min = *min;
    a.max = *max;
    if (section.Has("kind")) {
      auto kind = section.GetString("kind");
      if (*kind == "categorical") {
        a.kind = AttributeKind::kCategorical;
      } else if (*kind == "numerical" || *kind == "numerical-integer") {
        a.kind = AttributeKind::kNumericalInteger;
      } else {
        return absl::InvalidArgumentError(absl::StrFormat(
            "line %d: unknown kind '%s'", section.line, *kind));
      }
    }
    if (section.Has("rounding")) {
      auto rounding = section.GetInt("rounding");
      if (!rounding.ok()) return rounding.status();
      a.rounding = *rounding;
    }
    if (section.Has("confidential")) {
      auto confidential = section.GetBool("confidential");
      if (!confidential.ok()) return confidential.status();
      a.confidential = *confidential;
    }
    attributes.push_back(std::move(a));
  }
  return Schema::Create(std::move(attributes));
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto schema = ParseSchema(*text);
  if (!schema.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: %s", path, schema.status().message()));
  }
  return schema;
}

absl::StatusOr<Dataset> Dataset::Create(Schema schema,
                                        std::vector<std::vector<int64_t>> rows,
                                        bool allow_out_of_range) {
  if (rows.empty()) {
    return absl::InvalidArgumentError("dataset has no records");
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("record %d has %d cells, expected %d", r,
                          rows[r].size(), schema.size()));
    }
    if (allow_out_of_range) continue;
    for (size_t a = 0; a < schema.size(); ++a) {
      const AttributeSchema& attr = schema.attribute(a);
      if (rows[r][a] < attr.min || rows[r][a] > attr.max) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "record %d, attribute '%s': %d outside [%d, %d]", r, attr.name,
            rows[r][a], attr.min, attr.max));
      }
    }
  }
  return Dataset(std::move(schema), std::move(rows));
}

int64_t RoundValue(int64_t value, int64_t granularity) {
  if (granularity <= 1) return value;
  const int64_t q = value / granularity;
  const int64_t r = value % granularity;
  if (2 * r >= granularity) return (q + 1) * granularity;
  if (-2 * r >= granularity) return (q - 1) * granularity;
  return q * granularity;
}

absl::StatusOr<Dataset> ParseCsv(absl::string_view text, const Schema& schema) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  size_t line_index = 0;
  auto next_line = [&]() -> std::optional<absl::string_view> {
    while (line_index < lines.size()) {
      absl::string_view line =
          absl::StripAsciiWhitespace(lines[line_index++]);
      if (!line.empty()) return line;
    }
    return std::nullopt;
  };

  auto header_line = next_line();
  if (!header_line) return absl::InvalidArgumentError("CSV has no header");
  const std::vector<absl::string_view> header = SplitCells(*header_line);
  // column_of[attribute] = position in the file.
  std::vector<size_t> column_of(schema.size());
  for (size_t a = 0; a < schema.size(); ++a) {
    auto it = std::find(header.begin(), header.end(), schema.attribute(a).name);
    if (it == header.end()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "CSV header is missing column '%s'", schema.attribute(a).name));
    }
    column_of[a] = static_cast<size_t>(it - header.begin());
  }

  std::vector<std::vector<int64_t>> rows;
  while (auto line = next_line()) {
    const std::vector<absl::string_view> cells = SplitCells(*line);
    if (cells.size() != header.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: %d cells, header has %d", line_index,
                          cells.size(), header.size()));
    }
    std::vector<int64_t> row(schema.size());
    for (size_t a = 0; a < schema.size(); ++a) {
      const AttributeSchema& attr = schema.attribute(a);
      const absl::string_view cell = cells[column_of[a]];
      int64_t value = 0;
      if (!absl::SimpleAtoi(cell, &value)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d, column '%s': '%s' is not an integer",
                            line_index, attr.name, cell));
      }
      value = RoundValue(value, attr.rounding);
      if (value < attr.min || value > attr.max) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d, column '%s': %d outside [%d, %d]",
                            line_index, attr.name, value, attr.min, attr.max));
      }
      row[a] = value;
    }
    rows.push_back(std::move(row));
  }
  return Dataset::Create(schema, std::move(rows));
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path, const Schema& schema) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto dataset = ParseCsv(*text, schema);
  if (!dataset.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: %s", path, dataset.status().message()));
  }
  return dataset;
}

std::string FormatCsv(const Dataset& dataset) {
  std::string out;
  std::vector<std::string> names;
  for (const auto& a : dataset.schema().attributes()) names.push_back(a.name);
  absl::StrAppend(&out, absl::StrJoin(names, ","), "\n");
  for (const auto& row : dataset.rows()) {
    absl::StrAppend(&out, absl::StrJoin(row, ","), "\n");
  }
  return out;
}

absl::Status WriteCsv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrFormat("cannot write '%s'", path));
  }
  out << FormatCsv(dataset);
  if (!out) {
    return absl::DataLossError(absl::StrFormat("error writing '%s'", path));
  }
  return absl::OkStatus();
}

Dataset GenerateSynthetic(const Schema& schema, size_t num_records, Rng& rng,
                          const SyntheticOptions& options) {
  std::vector<std::vector<int64_t>> domains;
  for (const auto& a : schema.attributes()) domains.push_back(a.DomainValues());

  std::vector<double> skew_weights;
  const auto& confidential_domain = domains[schema.confidential_index()];
  for (size_t k = 0; k < confidential_domain.size(); ++k) {
    skew_weights.push_back(1.0 / static_cast<double>(k + 1));
  }
  std::discrete_distribution<size_t> skewed(skew_weights.begin(),
                                            skew_weights.end());

  std::vector<std::vector<int64_t>> rows(num_records);
  for (auto& row : rows) {
    row.resize(schema.size());
    for (size_t a = 0; a < schema.size(); ++a) {
      const auto& domain = domains[a];
      size_t index;
      if (options.skew_confidential && a == schema.confidential_index()) {
        index = skewed(rng);
      } else {
        index = std::uniform_int_distribution<size_t>(0, domain.size() - 1)(rng);
      }
      row[a] = domain[index];
    }
  }
  return *Dataset::Create(schema, std::move(rows));
}

absl::StatusOr<std::vector<size_t>> MatchRecords(const Dataset& dataset,
                                                 const KnownValues& known) {
  std::vector<std::pair<size_t, int64_t>> constraints;
  for (const auto& [name, value] : known) {
    auto index = dataset.schema().IndexOf(name);
    if (!index.ok()) return index.status();
    if (*index == dataset.schema().confidential_index()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "supplementary knowledge must not contain the confidential "
          "attribute '%s'",
          name));
    }
    constraints.emplace_back(*index, value);
  }
  std::vector<size_t> matches;
  for (size_t r = 0; r < dataset.num_records(); ++r) {
    bool match = true;
    for (const auto& [attribute, value] : constraints) {
      if (dataset.cell(r, attribute) != value) {
        match = false;
        break;
      }
    }
    if (match) matches.push_back(r);
  }
  return matches;
}

}  // namespace cae
