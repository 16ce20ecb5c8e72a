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

#include "cae/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <thread>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "cae/attack_models.h"
#include "cae/key_value.h"
#include "cae/linprog.h"

namespace cae {
namespace {

// Stream tag separating SK instantiation draws from release draws.
constexpr uint64_t kSkStream = 0x5eed5eedULL;

struct Cell {
  double h0;
  double area;
};

// Cells for one (parameter, replicate) work item, indexed by SK size.
struct ItemResult {
  std::vector<std::vector<Cell>> cells;
  std::vector<size_t> skipped;
  absl::Status status;
};

// The released artifact for one (parameter, replicate) pair.
struct Release {
  std::optional<Dataset> sample;
  std::vector<Bounds> record_bounds;
  std::optional<Dataset> perturbed;
  NoiseSpec noise;
};

absl::StatusOr<Release> BuildRelease(Technique technique, double parameter,
                                     const Dataset& dataset, Rng& rng) {
  Release release;
  switch (technique) {
    case Technique::kSampling: {
      auto sample = DrawSample(dataset, parameter, rng);
      if (!sample.ok()) return sample.status();
      release.sample = *std::move(sample);
      break;
    }
    case Technique::kQueryRestriction: {
      auto query = BuildQuerySystem(
          dataset, static_cast<size_t>(std::llround(parameter)), rng);
      if (!query.ok()) return query.status();
      auto solver = BoundsSolver::Create(query->system);
      if (!solver.ok()) return solver.status();
      const std::vector<Bounds> by_position = solver->SolveAll();
      release.record_bounds.resize(dataset.num_records());
      for (size_t r = 0; r < dataset.num_records(); ++r) {
        release.record_bounds[r] = by_position[query->position_of_record[r]];
      }
      break;
    }
    case Technique::kNoise: {
      auto spec = MakeNoiseSpec(dataset.schema(), parameter);
      if (!spec.ok()) return spec.status();
      auto perturbed = PerturbDataset(dataset, *spec, rng);
      if (!perturbed.ok()) return perturbed.status();
      release.noise = *std::move(spec);
      release.perturbed = *std::move(perturbed);
      break;
    }
  }
  return release;
}

absl::StatusOr<ValueDistribution> Posterior(Technique technique,
                                            const Release& release,
                                            const Dataset& dataset,
                                            const SupplementaryKnowledge& sk,
                                            std::span<const int64_t> domain) {
  switch (technique) {
    case Technique::kSampling:
      return SamplingPosterior(*release.sample, sk, domain);
    case Technique::kQueryRestriction:
      return QueryRestrictionPosteriorFromBounds(release.record_bounds,
                                                 dataset, sk, domain);
    case Technique::kNoise:
      return NoisePosterior(*release.perturbed, sk, release.noise, domain);
  }
  return absl::InternalError("unknown technique");
}

// One SK instantiation: the known attributes and the target record.
using Instantiation = std::pair<std::vector<size_t>, size_t>;

// Instantiations per SK size. With a cap, each of `cap` chains fixes a target
// and a random attribute order, and size s reveals the first s attributes, so
// every size is judged against the same targets. Without a cap, every subset
// is paired with every record.
absl::StatusOr<std::vector<std::vector<Instantiation>>> Instantiations(
    const Schema& schema, size_t n, size_t sk_sweep, size_t cap, Rng& rng) {
  std::vector<std::vector<Instantiation>> out(sk_sweep + 1);
  // Empty knowledge gives the same posterior for every target.
  out[0].emplace_back(std::vector<size_t>{}, 0);
  if (cap == 0) {
    for (size_t s = 1; s <= sk_sweep; ++s) {
      auto subsets = SkSubsets(schema, s, rng, 0);
      if (!subsets.ok()) return subsets.status();
      for (const auto& subset : *subsets) {
        for (size_t r = 0; r < n; ++r) out[s].emplace_back(subset, r);
      }
    }
    return out;
  }
  const std::vector<size_t> qi = schema.QuasiIdentifiers();
  if (sk_sweep > qi.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cannot know %d of %d non-confidential attributes", sk_sweep,
        qi.size()));
  }
  std::uniform_int_distribution<size_t> pick_record(0, n - 1);
  for (size_t chain = 0; chain < cap; ++chain) {
    const size_t target = pick_record(rng);
    std::vector<size_t> order = qi;
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t s = 1; s <= sk_sweep; ++s) {
      std::vector<size_t> subset(order.begin(),
                                 order.begin() + static_cast<long>(s));
      std::sort(subset.begin(), subset.end());
      out[s].emplace_back(std::move(subset), target);
    }
  }
  return out;
}

ItemResult RunItem(const ExperimentConfig& config, size_t sk_sweep,
                   double parameter, int replicate, const Dataset& dataset) {
  ItemResult result;
  result.cells.resize(sk_sweep + 1);
  result.skipped.assign(sk_sweep + 1, 0);
  const uint64_t seed = config.base_seed + static_cast<uint64_t>(replicate);
  Rng release_rng(seed);
  std::seed_seq sk_seed{seed, kSkStream};
  Rng sk_rng(sk_seed);

  auto release = BuildRelease(config.technique, parameter, dataset, release_rng);
  if (!release.ok()) {
    result.status = release.status();
    return result;
  }
  const Schema& schema = dataset.schema();
  const std::vector<int64_t> domain = schema.confidential().DomainValues();
  const size_t n = dataset.num_records();

  auto instantiations =
      Instantiations(schema, n, sk_sweep, config.instantiation_cap, sk_rng);
  if (!instantiations.ok()) {
    result.status = instantiations.status();
    return result;
  }
  for (size_t s = 0; s <= sk_sweep; ++s) {
    for (const auto& [attributes, target] : (*instantiations)[s]) {
      SupplementaryKnowledge sk;
      for (size_t a : attributes) {
        sk.known[schema.attribute(a).name] = dataset.cell(target, a);
      }
      auto matches = MatchRecords(dataset, sk.known);
      if (!matches.ok()) {
        result.status = matches.status();
        return result;
      }
      sk.original_match_count = matches->size();
      auto posterior =
          Posterior(config.technique, *release, dataset, sk, domain);
      if (!posterior.ok()) {
        ++result.skipped[s];
        continue;
      }
      const RiskReport report = ComputeRiskReport(*posterior);
      result.cells[s].push_back(Cell{report.h0, report.area});
    }
  }
  return result;
}

std::pair<double, double> MeanAndStd(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

size_t ResolvedSkSweep(const ExperimentConfig& config, const Schema& schema) {
  const size_t available = schema.QuasiIdentifiers().size();
  return config.sk_sweep < 0 ? available : static_cast<size_t>(config.sk_sweep);
}

absl::StatusOr<std::vector<double>> ParseNumberList(absl::string_view text) {
  std::vector<double> out;
  for (absl::string_view token : absl::StrSplit(text, ',')) {
    token = absl::StripAsciiWhitespace(token);
    double value = 0;
    if (!absl::SimpleAtod(token, &value)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("'%s' is not a number", token));
    }
    out.push_back(value);
  }
  return out;
}

// Binomial coefficient saturating at `limit + 1`.
size_t ChooseCapped(size_t n, size_t k, size_t limit) {
  long double c = 1;
  for (size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(limit)) return limit + 1;
  }
  return static_cast<size_t>(std::llround(static_cast<double>(c)));
}

absl::Status WriteText(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrFormat("cannot write '%s'", path));
  }
  out << text;
  if (!out) {
    return absl::DataLossError(absl::StrFormat("error writing '%s'", path));
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view TechniqueName(Technique technique) {
  switch (technique) {
    case Technique::kSampling:
      return "sampling";
    case Technique::kQueryRestriction:
      return "query-restriction";
    case Technique::kNoise:
      return "noise";
  }
  return "unknown";
}

absl::StatusOr<Technique> ParseTechnique(absl::string_view name) {
  if (name == "sampling") return Technique::kSampling;
  if (name == "query-restriction" || name == "query") {
    return Technique::kQueryRestriction;
  }
  if (name == "noise") return Technique::kNoise;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown technique '%s' (sampling, query-restriction, noise)", name));
}

std::vector<double> DefaultParameters(Technique technique) {
  switch (technique) {
    case Technique::kSampling:
      return {5, 10, 20, 50};
    case Technique::kQueryRestriction:
      return {2, 4, 8, 16, 32};
    case Technique::kNoise:
      return {10, 25, 50, 100};
  }
  return {};
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text) {
  auto sections = ParseKeyValue(text);
  if (!sections.ok()) return sections.status();
  if (sections->size() != 1) {
    return absl::InvalidArgumentError(
        "experiment config does not use [sections]");
  }
  const KeyValueSection& kv = sections->front();
  static const std::set<std::string> kKnownKeys = {
      "technique",         "parameters",   "replicates",
      "sk_sweep",          "base_seed",    "instantiation_cap",
      "threads",           "dataset",      "schema",
      "synthetic_records", "dataset_seed", "skew_confidential"};
  for (const auto& [key, value] : kv.entries) {
    if (!kKnownKeys.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("unknown config key '%s'", key));
    }
  }

  ExperimentConfig config;
  auto technique_name = kv.GetString("technique");
  if (!technique_name.ok()) return technique_name.status();
  auto technique = ParseTechnique(*technique_name);
  if (!technique.ok()) return technique.status();
  config.technique = *technique;

  if (kv.Has("parameters")) {
    auto parameters = ParseNumberList(*kv.GetString("parameters"));
    if (!parameters.ok()) return parameters.status();
    config.parameters = *std::move(parameters);
  } else {
    config.parameters = DefaultParameters(config.technique);
  }

  auto read_int = [&](const char* key, auto* out) -> absl::Status {
    if (!kv.Has(key)) return absl::OkStatus();
    auto value = kv.GetInt(key);
    if (!value.ok()) return value.status();
    *out = static_cast<std::remove_reference_t<decltype(*out)>>(*value);
    return absl::OkStatus();
  };
  absl::Status status;
  if (status = read_int("replicates", &config.replicates); !status.ok()) {
    return status;
  }
  if (status = read_int("sk_sweep", &config.sk_sweep); !status.ok()) {
    return status;
  }
  if (status = read_int("base_seed", &config.base_seed); !status.ok()) {
    return status;
  }
  if (status = read_int("threads", &config.threads); !status.ok()) {
    return status;
  }
  if (status = read_int("synthetic_records", &config.synthetic_records);
      !status.ok()) {
    return status;
  }
  if (status = read_int("dataset_seed", &config.dataset_seed); !status.ok()) {
    return status;
  }
  if (kv.Has("instantiation_cap")) {
    if (*kv.GetString("instantiation_cap") == "all") {
      config.instantiation_cap = 0;
    } else if (status = read_int("instantiation_cap", &config.instantiation_cap);
               !status.ok()) {
      return status;
    }
  }
  if (kv.Has("skew_confidential")) {
    auto skew = kv.GetBool("skew_confidential");
    if (!skew.ok()) return skew.status();
    config.skew_confidential = *skew;
  }
  if (kv.Has("dataset")) config.csv_path = *kv.GetString("dataset");
  if (kv.Has("schema")) config.schema_path = *kv.GetString("schema");
  return config;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto config = ParseExperimentConfig(*text);
  if (!config.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: %s", path, config.status().message()));
  }
  return config;
}

absl::Status ValidateConfig(const ExperimentConfig& config,
                            const Dataset& dataset) {
  if (config.replicates < 1) {
    return absl::InvalidArgumentError("replicates must be at least 1");
  }
  if (config.threads < 1) {
    return absl::InvalidArgumentError("threads must be at least 1");
  }
  if (config.parameters.empty()) {
    return absl::InvalidArgumentError("no technique parameters");
  }
  const size_t available = dataset.schema().QuasiIdentifiers().size();
  if (config.sk_sweep > static_cast<int>(available)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sk_sweep %d exceeds the %d non-confidential attributes",
        config.sk_sweep, available));
  }
  for (double p : config.parameters) {
    switch (config.technique) {
      case Technique::kSampling:
        if (!(p > 0 && p <= 100)) {
          return absl::InvalidArgumentError(
              absl::StrFormat("sampling factor %g outside (0, 100]", p));
        }
        break;
      case Technique::kQueryRestriction: {
        const double rounded = std::round(p);
        if (rounded != p || p < 2 || std::fmod(p, 2.0) != 0.0 ||
            p > static_cast<double>(dataset.num_records())) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "query set size %g must be even, >= 2 and <= %d", p,
              dataset.num_records()));
        }
        break;
      }
      case Technique::kNoise:
        if (!(p >= 0) || !std::isfinite(p)) {
          return absl::InvalidArgumentError(
              absl::StrFormat("noise percent %g must be >= 0", p));
        }
        break;
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> LoadExperimentDataset(const ExperimentConfig& config) {
  Schema schema = PumsSchema();
  if (!config.schema_path.empty()) {
    auto loaded = LoadSchema(config.schema_path);
    if (!loaded.ok()) return loaded.status();
    schema = *std::move(loaded);
  }
  if (!config.csv_path.empty()) return LoadCsv(config.csv_path, schema);
  if (config.synthetic_records == 0) {
    return absl::InvalidArgumentError("synthetic_records must be at least 1");
  }
  Rng rng(config.dataset_seed);
  return GenerateSynthetic(
      schema, config.synthetic_records, rng,
      SyntheticOptions{.skew_confidential = config.skew_confidential});
}

absl::StatusOr<std::vector<std::vector<size_t>>> SkSubsets(const Schema& schema,
                                                           size_t size,
                                                           Rng& rng,
                                                           size_t cap) {
  const std::vector<size_t> qi = schema.QuasiIdentifiers();
  if (size > qi.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cannot know %d of %d non-confidential attributes", size, qi.size()));
  }
  std::vector<std::vector<size_t>> subsets;
  const size_t limit = cap == 0 ? SIZE_MAX - 1 : cap;
  if (ChooseCapped(qi.size(), size, limit) <= limit) {
    // Lexicographic enumeration via a selection mask.
    std::vector<bool> chosen(qi.size(), false);
    std::fill(chosen.begin(), chosen.begin() + static_cast<long>(size), true);
    do {
      std::vector<size_t> subset;
      for (size_t i = 0; i < qi.size(); ++i) {
        if (chosen[i]) subset.push_back(qi[i]);
      }
      subsets.push_back(std::move(subset));
    } while (std::prev_permutation(chosen.begin(), chosen.end()));
    return subsets;
  }
  std::set<std::vector<size_t>> seen;
  std::vector<size_t> pool = qi;
  while (subsets.size() < cap) {
    for (size_t i = 0; i < size; ++i) {
      const size_t j =
          std::uniform_int_distribution<size_t>(i, pool.size() - 1)(rng);
      std::swap(pool[i], pool[j]);
    }
    std::vector<size_t> subset(pool.begin(),
                               pool.begin() + static_cast<long>(size));
    std::sort(subset.begin(), subset.end());
    if (seen.insert(subset).second) subsets.push_back(std::move(subset));
  }
  return subsets;
}

absl::StatusOr<ResultTable> RunExperiment(const ExperimentConfig& config,
                                          const Dataset& dataset) {
  if (auto status = ValidateConfig(config, dataset); !status.ok()) {
    return status;
  }
  const size_t sk_sweep = ResolvedSkSweep(config, dataset.schema());
  const size_t num_params = config.parameters.size();
  const size_t num_items = num_params * static_cast<size_t>(config.replicates);

  std::vector<ItemResult> items(num_items);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < num_items; i = next++) {
      const size_t p = i / static_cast<size_t>(config.replicates);
      const int replicate = static_cast<int>(i % config.replicates);
      items[i] = RunItem(config, sk_sweep, config.parameters[p], replicate,
                         dataset);
    }
  };
  const size_t num_threads = std::min(config.threads, num_items);
  if (num_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < num_threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  ResultTable table;
  for (size_t p = 0; p < num_params; ++p) {
    for (size_t s = 0; s <= sk_sweep; ++s) {
      std::vector<double> h0s;
      std::vector<double> areas;
      size_t skipped = 0;
      for (int r = 0; r < config.replicates; ++r) {
        const ItemResult& item =
            items[p * static_cast<size_t>(config.replicates) +
                  static_cast<size_t>(r)];
        if (!item.status.ok()) return item.status;
        for (const Cell& cell : item.cells[s]) {
          h0s.push_back(cell.h0);
          areas.push_back(cell.area);
        }
        skipped += item.skipped[s];
      }
      const auto [mean_h0, std_h0] = MeanAndStd(h0s);
      const auto [mean_area, std_area] = MeanAndStd(areas);
      table.rows.push_back(ResultRow{.technique = config.technique,
                                     .parameter = config.parameters[p],
                                     .sk_size = static_cast<int>(s),
                                     .mean_h0 = mean_h0,
                                     .mean_area = mean_area,
                                     .std_h0 = std_h0,
                                     .std_area = std_area,
                                     .replicates = config.replicates,
                                     .cells = h0s.size(),
                                     .skipped = skipped});
    }
  }
  return table;
}

std::string FormatResultCsv(const ResultTable& table) {
  std::string out =
      "technique,parameter,sk_size,mean_h0,mean_area,std_h0,std_area,"
      "replicates,cells,skipped\n";
  for (const ResultRow& row : table.rows) {
    absl::StrAppendFormat(&out, "%s,%g,%d,%.9f,%.9f,%.9f,%.9f,%d,%d,%d\n",
                          TechniqueName(row.technique), row.parameter,
                          row.sk_size, row.mean_h0, row.mean_area, row.std_h0,
                          row.std_area, row.replicates, row.cells,
                          row.skipped);
  }
  return out;
}

absl::Status EmitCsv(const ResultTable& table, const std::string& path) {
  return WriteText(FormatResultCsv(table), path);
}

std::string FormatCurveCsv(const EntropyCurve& curve) {
  std::string out = "epsilon,entropy_bits\n";
  for (size_t eps = 0; eps < curve.h.size(); ++eps) {
    absl::StrAppendFormat(&out, "%d,%.17g\n", eps, curve.h[eps]);
  }
  return out;
}

absl::Status EmitCurve(const ValueDistribution& dist, const std::string& path) {
  return WriteText(FormatCurveCsv(ComputeEntropyCurve(dist)), path);
}

absl::StatusOr<ValueDistribution> ParseDistributionCsv(absl::string_view text) {
  std::vector<std::pair<int64_t, double>> weighted;
  int line_number = 0;
  bool seen_data = false;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (cells.size() != 2) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: expected 'value,probability'", line_number));
    }
    int64_t value = 0;
    double prob = 0;
    const bool numeric =
        absl::SimpleAtoi(absl::StripAsciiWhitespace(cells[0]), &value) &&
        absl::SimpleAtod(absl::StripAsciiWhitespace(cells[1]), &prob);
    if (!numeric) {
      if (!seen_data && weighted.empty()) {
        seen_data = true;  // header
        continue;
      }
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: '%s' is not an integer value and a probability",
          line_number, line));
    }
    seen_data = true;
    weighted.emplace_back(value, prob);
  }
  if (weighted.empty()) {
    return absl::InvalidArgumentError("distribution file has no entries");
  }
  double total = 0;
  for (const auto& [value, prob] : weighted) total += prob;
  if (std::abs(total - 1.0) > 1e-6) {
    return absl::InvalidArgumentError(
        absl::StrFormat("probabilities sum to %.9f, expected 1", total));
  }
  return ValueDistribution::FromWeights(weighted);
}

absl::StatusOr<ValueDistribution> LoadDistribution(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto dist = ParseDistributionCsv(*text);
  if (!dist.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: %s", path, dist.status().message()));
  }
  return dist;
}

}  // namespace cae
