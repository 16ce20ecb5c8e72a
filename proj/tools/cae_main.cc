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

// cae: disclosure-risk measurement for statistical disclosure control.
//
//   cae measure <dist.csv> [--out curve.csv]
//   cae attack --technique T --param P [--sk Age=37,Sex=1] [--data x.csv]
//   cae experiment --config exp.cfg [--out results.csv] [--seed S]
//   cae synth --records N [--seed S] --out data.csv
//
// Exit status: 0 on success, 1 for usage errors, 2 for data errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "cae/attack_models.h"
#include "cae/dataset.h"
#include "cae/entropy.h"
#include "cae/experiment.h"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

int Fail(int code, const absl::Status& status) {
  std::cerr << "cae: " << status.message() << "\n";
  return code;
}

void PrintReport(const cae::RiskReport& report) {
  std::cout << absl::StrFormat("h0_bits=%.6f\narea=%.6f\nepsilon_max=%d\n",
                               report.h0, report.area, report.epsilon_max);
}

absl::StatusOr<cae::Schema> SchemaFrom(const std::string& path) {
  if (path.empty()) return cae::PumsSchema();
  return cae::LoadSchema(path);
}

absl::StatusOr<cae::KnownValues> ParseKnown(const std::string& text) {
  cae::KnownValues known;
  if (text.empty()) return known;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    std::vector<absl::string_view> parts = absl::StrSplit(item, '=');
    int64_t value = 0;
    if (parts.size() != 2 || !absl::SimpleAtoi(parts[1], &value)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("bad --sk entry '%s' (want Name=value)", item));
    }
    known[std::string(parts[0])] = value;
  }
  return known;
}

int RunMeasure(const std::string& in, const std::string& out) {
  auto dist = cae::LoadDistribution(in);
  if (!dist.ok()) return Fail(kDataError, dist.status());
  PrintReport(cae::ComputeRiskReport(*dist));
  if (!out.empty()) {
    if (auto status = cae::EmitCurve(*dist, out); !status.ok()) {
      return Fail(kDataError, status);
    }
  }
  return 0;
}

struct AttackOptions {
  std::string technique;
  double param = 0;
  std::string sk;
  std::string data;
  std::string schema;
  size_t records = 2500;
  uint64_t seed = 1;
  std::string out;
};

int RunAttack(const AttackOptions& opt) {
  auto technique = cae::ParseTechnique(opt.technique);
  if (!technique.ok()) return Fail(kUsageError, technique.status());
  auto known = ParseKnown(opt.sk);
  if (!known.ok()) return Fail(kUsageError, known.status());
  auto schema = SchemaFrom(opt.schema);
  if (!schema.ok()) return Fail(kUsageError, schema.status());

  cae::Rng rng(opt.seed);
  absl::StatusOr<cae::Dataset> dataset =
      opt.data.empty() ? cae::GenerateSynthetic(*schema, opt.records, rng)
                       : cae::LoadCsv(opt.data, *schema);
  if (!dataset.ok()) return Fail(kDataError, dataset.status());

  auto matches = cae::MatchRecords(*dataset, *known);
  if (!matches.ok()) return Fail(kUsageError, matches.status());
  cae::SupplementaryKnowledge sk{.known = *known,
                                 .original_match_count = matches->size()};
  const std::vector<int64_t> domain =
      dataset->schema().confidential().DomainValues();

  absl::StatusOr<cae::ValueDistribution> posterior =
      absl::InternalError("unreachable");
  switch (*technique) {
    case cae::Technique::kSampling: {
      auto sample = cae::DrawSample(*dataset, opt.param, rng);
      if (!sample.ok()) return Fail(kUsageError, sample.status());
      posterior = cae::SamplingPosterior(*sample, sk, domain);
      break;
    }
    case cae::Technique::kQueryRestriction: {
      auto release = cae::BuildQuerySystem(
          *dataset, static_cast<size_t>(opt.param), rng);
      if (!release.ok()) return Fail(kUsageError, release.status());
      posterior = cae::QueryRestrictionPosterior(*release, *dataset, sk, domain);
      break;
    }
    case cae::Technique::kNoise: {
      auto spec = cae::MakeNoiseSpec(dataset->schema(), opt.param);
      if (!spec.ok()) return Fail(kUsageError, spec.status());
      auto perturbed = cae::PerturbDataset(*dataset, *spec, rng);
      if (!perturbed.ok()) return Fail(kDataError, perturbed.status());
      posterior = cae::NoisePosterior(*perturbed, sk, *spec, domain);
      break;
    }
  }
  if (!posterior.ok()) return Fail(kDataError, posterior.status());

  std::cout << absl::StrFormat("matches=%d\n", matches->size());
  std::cout << "value,probability\n";
  for (size_t i = 0; i < posterior->size(); ++i) {
    std::cout << absl::StrFormat("%d,%.9f\n", posterior->values()[i],
                                 posterior->probs()[i]);
  }
  PrintReport(cae::ComputeRiskReport(*posterior));
  if (!opt.out.empty()) {
    if (auto status = cae::EmitCurve(*posterior, opt.out); !status.ok()) {
      return Fail(kDataError, status);
    }
  }
  return 0;
}

struct ExperimentOptions {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::optional<int> replicates;
  std::optional<size_t> threads;
};

int RunExperimentCommand(const ExperimentOptions& opt) {
  auto config = cae::LoadExperimentConfig(opt.config);
  if (!config.ok()) return Fail(kUsageError, config.status());
  if (opt.seed) config->base_seed = *opt.seed;
  if (opt.replicates) config->replicates = *opt.replicates;
  if (opt.threads) config->threads = *opt.threads;
  auto dataset = cae::LoadExperimentDataset(*config);
  if (!dataset.ok()) return Fail(kDataError, dataset.status());
  if (auto status = cae::ValidateConfig(*config, *dataset); !status.ok()) {
    return Fail(kUsageError, status);
  }
  auto table = cae::RunExperiment(*config, *dataset);
  if (!table.ok()) return Fail(kDataError, table.status());
  if (opt.out.empty()) {
    std::cout << cae::FormatResultCsv(*table);
    return 0;
  }
  if (auto status = cae::EmitCsv(*table, opt.out); !status.ok()) {
    return Fail(kDataError, status);
  }
  return 0;
}

int RunSynth(const std::string& schema_path, size_t records, uint64_t seed,
             bool skew, const std::string& out) {
  auto schema = SchemaFrom(schema_path);
  if (!schema.ok()) return Fail(kUsageError, schema.status());
  if (records == 0) {
    return Fail(kUsageError, absl::InvalidArgumentError("--records must be >= 1"));
  }
  cae::Rng rng(seed);
  const cae::Dataset dataset = cae::GenerateSynthetic(
      *schema, records, rng, cae::SyntheticOptions{.skew_confidential = skew});
  if (out.empty()) {
    std::cout << cae::FormatCsv(dataset);
    return 0;
  }
  if (auto status = cae::WriteCsv(dataset, out); !status.ok()) {
    return Fail(kDataError, status);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-based disclosure risk measurement"};
  app.require_subcommand(1);

  std::string measure_in;
  std::string measure_out;
  auto* measure = app.add_subcommand(
      "measure", "Risk report and entropy curve of a value distribution");
  measure->add_option("input", measure_in, "value,probability file")
      ->required();
  measure->add_option("--out", measure_out, "Write epsilon,entropy_bits CSV");

  AttackOptions attack_opt;
  auto* attack = app.add_subcommand(
      "attack", "Intruder posterior for one technique and one SK");
  attack->add_option("--technique", attack_opt.technique,
                     "sampling | query-restriction | noise")
      ->required();
  attack->add_option("--param", attack_opt.param,
                     "Sampling factor, query set size or noise percent")
      ->required();
  attack->add_option("--sk", attack_opt.sk, "Known values, e.g. Age=37,Sex=1");
  attack->add_option("--data", attack_opt.data, "Dataset CSV (default synthetic)");
  attack->add_option("--schema", attack_opt.schema, "Schema file (default PUMS)");
  attack->add_option("--records", attack_opt.records,
                     "Synthetic records when --data is absent");
  attack->add_option("--seed", attack_opt.seed, "Random seed");
  attack->add_option("--out", attack_opt.out, "Write the posterior's curve CSV");

  ExperimentOptions experiment_opt;
  auto* experiment =
      app.add_subcommand("experiment", "Run a parameter / SK sweep");
  experiment->add_option("--config", experiment_opt.config, "Experiment file")
      ->required();
  experiment->add_option("--out", experiment_opt.out, "Result CSV path");
  experiment->add_option("--seed", experiment_opt.seed, "Override base_seed");
  experiment->add_option("--replicates", experiment_opt.replicates,
                         "Override replicates");
  experiment->add_option("--threads", experiment_opt.threads,
                         "Worker threads");

  std::string synth_schema;
  std::string synth_out;
  size_t synth_records = 2500;
  uint64_t synth_seed = 1;
  bool synth_skew = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--schema", synth_schema, "Schema file (default PUMS)");
  synth->add_option("--records", synth_records, "Number of records");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_flag("--skew", synth_skew, "Skew the confidential attribute");
  synth->add_option("--out", synth_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (*measure) return RunMeasure(measure_in, measure_out);
  if (*attack) return RunAttack(attack_opt);
  if (*experiment) return RunExperimentCommand(experiment_opt);
  if (*synth) {
    return RunSynth(synth_schema, synth_records, synth_seed, synth_skew,
                    synth_out);
  }
  return kUsageError;
}
