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

#include "cae/attack_models.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace cae {
namespace {

absl::Status ValidateDomain(std::span<const int64_t> domain) {
  if (domain.empty()) return absl::InvalidArgumentError("empty domain");
  for (size_t i = 1; i < domain.size(); ++i) {
    if (domain[i - 1] >= domain[i]) {
      return absl::InvalidArgumentError("domain must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ValueDistribution> FromDomainWeights(
    std::span<const int64_t> domain, const std::vector<double>& weights) {
  std::vector<std::pair<int64_t, double>> weighted;
  weighted.reserve(domain.size());
  for (size_t i = 0; i < domain.size(); ++i) {
    weighted.emplace_back(domain[i], weights[i]);
  }
  return ValueDistribution::FromWeights(weighted);
}

// Pmf of the centered binomial noise indexed by offset + m/2.
std::vector<double> PmfTable(int64_t m) {
  std::vector<double> table(static_cast<size_t>(m) + 1);
  for (int64_t k = 0; k <= m; ++k) {
    table[static_cast<size_t>(k)] = CenteredBinomialPmf(m, k - m / 2);
  }
  return table;
}

// Pr(noise = delta) for an attribute with the given noise, where delta is in
// value units and must be a multiple of the step.
double NoiseLikelihood(const AttributeNoise& noise,
                       const std::vector<double>& table, int64_t delta) {
  if (delta % noise.step != 0) return 0.0;
  const int64_t index = delta / noise.step + noise.max_noise / 2;
  if (index < 0 || index > noise.max_noise) return 0.0;
  return table[static_cast<size_t>(index)];
}

}  // namespace

absl::StatusOr<Dataset> DrawSample(const Dataset& dataset,
                                   double factor_percent, Rng& rng) {
  if (!(factor_percent > 0.0 && factor_percent <= 100.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sampling factor must be in (0, 100], got %g", factor_percent));
  }
  const size_t n = dataset.num_records();
  const auto size = static_cast<size_t>(
      std::floor(static_cast<double>(n) * factor_percent / 100.0 + 1e-9));
  if (size == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "a %g%% sample of %d records is empty", factor_percent, n));
  }
  // Partial Fisher-Yates over record indices.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t i = 0; i < size; ++i) {
    const size_t j = std::uniform_int_distribution<size_t>(i, n - 1)(rng);
    std::swap(order[i], order[j]);
  }
  order.resize(size);
  std::sort(order.begin(), order.end());
  std::vector<std::vector<int64_t>> rows;
  rows.reserve(size);
  for (size_t r : order) rows.push_back(dataset.record(r));
  return Dataset::Create(dataset.schema(), std::move(rows));
}

absl::StatusOr<ValueDistribution> SamplingPosterior(
    const Dataset& sample, const SupplementaryKnowledge& sk,
    std::span<const int64_t> domain) {
  if (auto status = ValidateDomain(domain); !status.ok()) return status;
  if (sk.original_match_count == 0) {
    return absl::NotFoundError("no original record matches the knowledge");
  }
  auto matches = MatchRecords(sample, sk.known);
  if (!matches.ok()) return matches.status();
  const double m_o = static_cast<double>(sk.original_match_count);
  const double m_s = static_cast<double>(matches->size());
  if (matches->size() > sk.original_match_count) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d sample matches exceed the %d original matches", matches->size(),
        sk.original_match_count));
  }
  std::map<int64_t, size_t> index_of;
  for (size_t i = 0; i < domain.size(); ++i) index_of[domain[i]] = i;

  const double unseen = (m_o - m_s) / m_o / static_cast<double>(domain.size());
  std::vector<double> weights(domain.size(), unseen);
  for (size_t r : *matches) {
    auto it = index_of.find(sample.confidential_value(r));
    if (it == index_of.end()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "sample value %d is not in the domain", sample.confidential_value(r)));
    }
    weights[it->second] += 1.0 / m_o;
  }
  return FromDomainWeights(domain, weights);
}

absl::StatusOr<QueryRelease> BuildQuerySystem(const Dataset& dataset,
                                              size_t query_size, Rng& rng) {
  const size_t n = dataset.num_records();
  if (query_size < 2 || query_size % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "query set size must be even and at least 2, got %d", query_size));
  }
  if (query_size > n) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "query set size %d exceeds the %d records", query_size, n));
  }
  std::vector<size_t> record_at(n);
  std::iota(record_at.begin(), record_at.end(), size_t{0});
  for (size_t i = n; i > 1; --i) {
    const size_t j = std::uniform_int_distribution<size_t>(0, i - 1)(rng);
    std::swap(record_at[i - 1], record_at[j]);
  }

  const size_t stride = query_size / 2;
  const size_t num_queries = 2 * n / query_size - 1;
  std::vector<RangeEquation> equations;
  equations.reserve(num_queries);
  for (size_t e = 0; e < num_queries; ++e) {
    RangeEquation eq{.begin = e * stride, .length = query_size, .sum = 0};
    for (size_t p = eq.begin; p < eq.begin + eq.length; ++p) {
      eq.sum += dataset.confidential_value(record_at[p]);
    }
    equations.push_back(eq);
  }
  const std::vector<int64_t> domain =
      dataset.schema().confidential().DomainValues();
  auto system = QuerySystem::Create(n, std::move(equations), domain.front(),
                                    domain.back());
  if (!system.ok()) return system.status();

  std::vector<size_t> position_of_record(n);
  for (size_t p = 0; p < n; ++p) position_of_record[record_at[p]] = p;
  return QueryRelease{.system = *std::move(system),
                      .position_of_record = std::move(position_of_record)};
}

absl::StatusOr<ValueDistribution> QueryRestrictionPosteriorFromBounds(
    std::span<const Bounds> record_bounds, const Dataset& dataset,
    const SupplementaryKnowledge& sk, std::span<const int64_t> domain) {
  if (auto status = ValidateDomain(domain); !status.ok()) return status;
  if (record_bounds.size() != dataset.num_records()) {
    return absl::InvalidArgumentError("one bound pair per record required");
  }
  auto matches = MatchRecords(dataset, sk.known);
  if (!matches.ok()) return matches.status();
  if (matches->empty()) {
    return absl::NotFoundError("no original record matches the knowledge");
  }
  constexpr double kSlack = 1e-9;
  const double share = 1.0 / static_cast<double>(matches->size());
  std::vector<double> weights(domain.size(), 0.0);
  for (size_t r : *matches) {
    const Bounds& b = record_bounds[r];
    const auto first = std::lower_bound(
        domain.begin(), domain.end(), b.lower - kSlack,
        [](int64_t v, double x) { return static_cast<double>(v) < x; });
    const auto last = std::upper_bound(
        domain.begin(), domain.end(), b.upper + kSlack,
        [](double x, int64_t v) { return x < static_cast<double>(v); });
    if (first >= last) {
      return absl::InternalError(absl::StrFormat(
          "bounds [%g, %g] of record %d contain no domain value", b.lower,
          b.upper, r));
    }
    const double each = share / static_cast<double>(last - first);
    for (auto it = first; it != last; ++it) {
      weights[static_cast<size_t>(it - domain.begin())] += each;
    }
  }
  return FromDomainWeights(domain, weights);
}

absl::StatusOr<ValueDistribution> QueryRestrictionPosterior(
    const QueryRelease& release, const Dataset& dataset,
    const SupplementaryKnowledge& sk, std::span<const int64_t> domain) {
  if (release.position_of_record.size() != dataset.num_records()) {
    return absl::InvalidArgumentError("release does not match the dataset");
  }
  auto matches = MatchRecords(dataset, sk.known);
  if (!matches.ok()) return matches.status();
  auto solver = BoundsSolver::Create(release.system);
  if (!solver.ok()) return solver.status();
  // Only matched records need bounds; the rest keep the full box.
  const Bounds box{.lower = static_cast<double>(release.system.lower()),
                   .upper = static_cast<double>(release.system.upper())};
  std::vector<Bounds> bounds(dataset.num_records(), box);
  for (size_t r : *matches) {
    bounds[r] = solver->Solve(release.position_of_record[r]);
  }
  return QueryRestrictionPosteriorFromBounds(bounds, dataset, sk, domain);
}

int64_t MaxNoise(double percent, int64_t domain_size) {
  const double raw =
      percent / 100.0 * static_cast<double>(std::max<int64_t>(domain_size - 1, 0));
  return 2 * static_cast<int64_t>(std::floor(raw / 2.0 + 0.5 + 1e-9));
}

absl::StatusOr<NoiseSpec> MakeNoiseSpec(const Schema& schema, double percent) {
  if (!(percent >= 0.0) || !std::isfinite(percent)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise percent must be >= 0, got %g", percent));
  }
  NoiseSpec spec{.percent = percent, .attributes = {}};
  for (const auto& a : schema.attributes()) {
    spec.attributes.push_back(AttributeNoise{
        .max_noise = MaxNoise(percent, a.DomainSize()), .step = a.rounding});
  }
  return spec;
}

double CenteredBinomialPmf(int64_t m, int64_t offset) {
  if (m < 0 || m % 2 != 0) return 0.0;
  const int64_t k = offset + m / 2;
  if (k < 0 || k > m) return 0.0;
  const int64_t r = std::min(k, m - k);
  double coefficient = 1.0;
  for (int64_t i = 1; i <= r; ++i) {
    coefficient = coefficient * static_cast<double>(m - r + i) /
                  static_cast<double>(i);
  }
  return std::ldexp(coefficient, -static_cast<int>(m));
}

absl::StatusOr<Dataset> PerturbDataset(const Dataset& dataset,
                                       const NoiseSpec& spec, Rng& rng) {
  const Schema& schema = dataset.schema();
  if (spec.attributes.size() != schema.size()) {
    return absl::InvalidArgumentError("noise spec does not match the schema");
  }
  for (const AttributeNoise& noise : spec.attributes) {
    if (noise.max_noise < 0 || noise.max_noise % 2 != 0 || noise.step < 1) {
      return absl::InvalidArgumentError(
          "maximum noise must be even and non-negative");
    }
  }
  std::vector<std::vector<int64_t>> rows = dataset.rows();
  for (auto& row : rows) {
    for (size_t a = 0; a < row.size(); ++a) {
      const AttributeNoise& noise = spec.attributes[a];
      // B ~ Binomial(M, 1/2) as a popcount of M fair bits.
      int64_t successes = 0;
      for (int64_t remaining = noise.max_noise; remaining > 0;
           remaining -= 64) {
        uint64_t bits = rng();
        if (remaining < 64) bits &= (uint64_t{1} << remaining) - 1;
        successes += std::popcount(bits);
      }
      row[a] += (successes - noise.max_noise / 2) * noise.step;
    }
  }
  return Dataset::Create(schema, std::move(rows), /*allow_out_of_range=*/true);
}

absl::StatusOr<ValueDistribution> NoisePosterior(
    const Dataset& perturbed, const SupplementaryKnowledge& sk,
    const NoiseSpec& spec, std::span<const int64_t> domain) {
  if (auto status = ValidateDomain(domain); !status.ok()) return status;
  const Schema& schema = perturbed.schema();
  if (spec.attributes.size() != schema.size()) {
    return absl::InvalidArgumentError("noise spec does not match the schema");
  }
  std::vector<std::pair<size_t, int64_t>> known;
  for (const auto& [name, value] : sk.known) {
    auto index = schema.IndexOf(name);
    if (!index.ok()) return index.status();
    if (*index == schema.confidential_index()) {
      return absl::InvalidArgumentError(
          "supplementary knowledge must not contain the confidential "
          "attribute");
    }
    known.emplace_back(*index, value);
  }
  std::vector<std::vector<double>> tables;
  for (const AttributeNoise& noise : spec.attributes) {
    tables.push_back(PmfTable(noise.max_noise));
  }

  const size_t c = schema.confidential_index();
  const AttributeNoise& confidential_noise = spec.attributes[c];
  std::vector<double> weights(domain.size(), 0.0);
  bool any_match = false;
  for (size_t r = 0; r < perturbed.num_records(); ++r) {
    double w = 1.0;
    for (const auto& [a, value] : known) {
      w *= NoiseLikelihood(spec.attributes[a], tables[a],
                           perturbed.cell(r, a) - value);
      if (w == 0.0) break;
    }
    if (w == 0.0) continue;
    any_match = true;
    const int64_t observed = perturbed.cell(r, c);
    for (size_t i = 0; i < domain.size(); ++i) {
      weights[i] += w * NoiseLikelihood(confidential_noise, tables[c],
                                        observed - domain[i]);
    }
  }
  if (!any_match) {
    return absl::NotFoundError("no perturbed record is consistent with the "
                               "knowledge");
  }
  auto posterior = FromDomainWeights(domain, weights);
  if (!posterior.ok()) {
    return absl::NotFoundError(
        "no domain value is consistent with the matching records");
  }
  return posterior;
}

}  // namespace cae
