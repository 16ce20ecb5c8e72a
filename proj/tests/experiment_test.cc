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

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "cae/attack_models.h"
#include "gtest/gtest.h"

namespace cae {
namespace {

Dataset SmallDataset(size_t n = 120, uint64_t seed = 1) {
  Rng rng(seed);
  return GenerateSynthetic(PumsSchema(), n, rng);
}

TEST(TechniqueTest, NamesRoundTrip) {
  for (Technique t : {Technique::kSampling, Technique::kQueryRestriction,
                      Technique::kNoise}) {
    EXPECT_EQ(*ParseTechnique(TechniqueName(t)), t);
  }
  EXPECT_FALSE(ParseTechnique("swapping").ok());
  EXPECT_EQ(DefaultParameters(Technique::kQueryRestriction),
            (std::vector<double>{2, 4, 8, 16, 32}));
}

TEST(ParseExperimentConfigTest, ReadsEveryKey) {
  auto config = ParseExperimentConfig(
      "technique = noise\n"
      "parameters = 10, 50\n"
      "replicates = 3\n"
      "sk_sweep = 2\n"
      "base_seed = 9\n"
      "instantiation_cap = all\n"
      "threads = 2\n"
      "synthetic_records = 40\n"
      "dataset_seed = 4\n"
      "skew_confidential = true\n");
  ASSERT_TRUE(config.ok()) << config.status();
  EXPECT_EQ(config->technique, Technique::kNoise);
  EXPECT_EQ(config->parameters, (std::vector<double>{10, 50}));
  EXPECT_EQ(config->replicates, 3);
  EXPECT_EQ(config->sk_sweep, 2);
  EXPECT_EQ(config->base_seed, 9u);
  EXPECT_EQ(config->instantiation_cap, 0u);
  EXPECT_EQ(config->threads, 2u);
  EXPECT_EQ(config->synthetic_records, 40u);
  EXPECT_EQ(config->dataset_seed, 4u);
  EXPECT_TRUE(config->skew_confidential);
}

TEST(ParseExperimentConfigTest, DefaultsAndErrors) {
  auto config = ParseExperimentConfig("technique = sampling\n");
  ASSERT_TRUE(config.ok());
  EXPECT_EQ(config->parameters, DefaultParameters(Technique::kSampling));
  EXPECT_EQ(config->replicates, 30);
  EXPECT_FALSE(ParseExperimentConfig("replicates = 3\n").ok());
  EXPECT_FALSE(ParseExperimentConfig("technique = noise\ncolour = red\n").ok());
  EXPECT_FALSE(ParseExperimentConfig("technique = noise\nparameters = a\n").ok());
  EXPECT_FALSE(ParseExperimentConfig("technique = noise\nreplicates = x\n").ok());
}

TEST(ValidateConfigTest, TechniqueRanges) {
  const Dataset data = SmallDataset();
  ExperimentConfig config;
  config.technique = Technique::kQueryRestriction;
  config.parameters = {2, 4};
  EXPECT_TRUE(ValidateConfig(config, data).ok());
  config.parameters = {3};
  EXPECT_FALSE(ValidateConfig(config, data).ok());
  config.parameters = {240};
  EXPECT_FALSE(ValidateConfig(config, data).ok());
  config.technique = Technique::kSampling;
  config.parameters = {0};
  EXPECT_FALSE(ValidateConfig(config, data).ok());
  config.parameters = {100};
  EXPECT_TRUE(ValidateConfig(config, data).ok());
  config.technique = Technique::kNoise;
  config.parameters = {-5};
  EXPECT_FALSE(ValidateConfig(config, data).ok());
  config.parameters = {10};
  config.sk_sweep = 7;
  EXPECT_FALSE(ValidateConfig(config, data).ok());
  config.sk_sweep = 2;
  config.replicates = 0;
  EXPECT_FALSE(ValidateConfig(config, data).ok());
}

TEST(SkSubsetsTest, EnumeratesWhenUnderCap) {
  Rng rng(1);
  auto subsets = SkSubsets(PumsSchema(), 2, rng, 64);
  ASSERT_TRUE(subsets.ok());
  EXPECT_EQ(subsets->size(), 15u);
  std::set<std::vector<size_t>> unique(subsets->begin(), subsets->end());
  EXPECT_EQ(unique.size(), 15u);
  for (const auto& s : *subsets) {
    ASSERT_EQ(s.size(), 2u);
    EXPECT_LT(s[0], s[1]);
    EXPECT_NE(s[0], PumsSchema().confidential_index());
    EXPECT_NE(s[1], PumsSchema().confidential_index());
  }
  EXPECT_EQ(SkSubsets(PumsSchema(), 0, rng, 64)->size(), 1u);
  EXPECT_EQ(SkSubsets(PumsSchema(), 6, rng, 0)->size(), 1u);
}

TEST(SkSubsetsTest, SamplesDistinctSubsetsOverCap) {
  Rng rng(2);
  auto subsets = SkSubsets(PumsSchema(), 3, rng, 5);
  ASSERT_TRUE(subsets.ok());
  EXPECT_EQ(subsets->size(), 5u);
  std::set<std::vector<size_t>> unique(subsets->begin(), subsets->end());
  EXPECT_EQ(unique.size(), 5u);
  EXPECT_FALSE(SkSubsets(PumsSchema(), 7, rng, 5).ok());
}

ExperimentConfig SmallConfig(Technique technique) {
  ExperimentConfig config;
  config.technique = technique;
  config.parameters = DefaultParameters(technique);
  config.replicates = 4;
  config.instantiation_cap = 16;
  return config;
}

TEST(RunExperimentTest, TableShape) {
  const Dataset data = SmallDataset();
  for (Technique t : {Technique::kSampling, Technique::kQueryRestriction,
                      Technique::kNoise}) {
    const ExperimentConfig config = SmallConfig(t);
    auto table = RunExperiment(config, data);
    ASSERT_TRUE(table.ok()) << table.status();
    ASSERT_EQ(table->rows.size(), config.parameters.size() * 7);
    for (size_t i = 0; i < table->rows.size(); ++i) {
      const ResultRow& row = table->rows[i];
      EXPECT_EQ(row.technique, t);
      EXPECT_EQ(row.parameter, config.parameters[i / 7]);
      EXPECT_EQ(row.sk_size, static_cast<int>(i % 7));
      EXPECT_EQ(row.replicates, 4);
      EXPECT_EQ(row.cells + row.skipped, row.sk_size == 0 ? 4u : 64u);
      EXPECT_GE(row.mean_h0, 0.0);
      EXPECT_LE(row.mean_h0, std::log2(25.0) + 1e-9);
      EXPECT_GE(row.mean_area, 0.0);
    }
  }
}

TEST(RunExperimentTest, DeterministicAcrossThreadCounts) {
  const Dataset data = SmallDataset();
  ExperimentConfig config = SmallConfig(Technique::kQueryRestriction);
  const std::string serial = FormatResultCsv(*RunExperiment(config, data));
  EXPECT_EQ(serial, FormatResultCsv(*RunExperiment(config, data)));
  config.threads = 4;
  EXPECT_EQ(serial, FormatResultCsv(*RunExperiment(config, data)));
  config.base_seed = 2;
  EXPECT_NE(serial, FormatResultCsv(*RunExperiment(config, data)));
}

TEST(RunExperimentTest, FullSampleLimit) {
  // At factor 100 the sample is the whole table, so the posterior is the
  // empirical distribution of the matches: H0 reaches 0 wherever the
  // knowledge isolates one record.
  const Dataset data = SmallDataset(60);
  ExperimentConfig config = SmallConfig(Technique::kSampling);
  config.parameters = {100};
  config.replicates = 2;
  config.instantiation_cap = 0;
  auto table = RunExperiment(config, data);
  ASSERT_TRUE(table.ok());
  EXPECT_EQ(table->rows.back().mean_h0, 0.0);

  Rng rng(3);
  auto sample = *DrawSample(data, 100, rng);
  const auto domain = data.schema().confidential().DomainValues();
  KnownValues known = {{"Sex", 1}};
  auto matches = *MatchRecords(data, known);
  auto posterior = *SamplingPosterior(
      sample, {.known = known, .original_match_count = matches.size()},
      domain);
  std::map<int64_t, double> empirical;
  for (size_t r : matches) {
    empirical[data.confidential_value(r)] += 1.0 / matches.size();
  }
  ASSERT_EQ(posterior.size(), empirical.size());
  size_t i = 0;
  for (const auto& [value, p] : empirical) {
    EXPECT_EQ(posterior.values()[i], value);
    EXPECT_NEAR(posterior.probs()[i], p, 1e-12);
    ++i;
  }
}

TEST(RunExperimentTest, InvalidConfigIsRejected) {
  ExperimentConfig config = SmallConfig(Technique::kSampling);
  config.parameters = {150};
  EXPECT_FALSE(RunExperiment(config, SmallDataset()).ok());
}

TEST(ResultCsvTest, HeaderAndFormatting) {
  ResultTable table;
  table.rows.push_back({.technique = Technique::kQueryRestriction,
                        .parameter = 4,
                        .sk_size = 2,
                        .mean_h0 = 1.5,
                        .mean_area = 10.25,
                        .std_h0 = 0.5,
                        .std_area = 2,
                        .replicates = 30,
                        .cells = 1920,
                        .skipped = 3});
  const std::string csv = FormatResultCsv(table);
  const std::vector<std::string> lines = absl::StrSplit(csv, '\n');
  ASSERT_GE(lines.size(), 2u);
  EXPECT_EQ(lines[0],
            "technique,parameter,sk_size,mean_h0,mean_area,std_h0,std_area,"
            "replicates,cells,skipped");
  EXPECT_EQ(lines[1],
            "query-restriction,4,2,1.500000000,10.250000000,0.500000000,"
            "2.000000000,30,1920,3");
}

TEST(CurveCsvTest, WorkedExample) {
  auto dist = *ValueDistribution::Create({1, 3, 8, 9}, {0.15, 0.1, 0.7, 0.05});
  const std::string csv = FormatCurveCsv(ComputeEntropyCurve(dist));
  const std::vector<std::string> lines =
      absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 10u);
  EXPECT_EQ(lines[0], "epsilon,entropy_bits");
  EXPECT_TRUE(absl::StartsWith(lines[1], "0,1.31"));
  EXPECT_EQ(lines[9], "8,0");
}

TEST(DistributionCsvTest, ParsesAndValidates) {
  auto dist = ParseDistributionCsv("value,probability\n8,0.7\n1,0.15\n"
                                   "3,0.1\n9,0.05\n");
  ASSERT_TRUE(dist.ok()) << dist.status();
  EXPECT_EQ(dist->values()[0], 1);
  EXPECT_EQ(dist->size(), 4u);
  EXPECT_TRUE(ParseDistributionCsv("1,0.5\n1,0.5\n").ok());
  EXPECT_FALSE(ParseDistributionCsv("1,0.5\n2,0.4\n").ok());
  EXPECT_FALSE(ParseDistributionCsv("1,0.5\n2\n").ok());
  EXPECT_FALSE(ParseDistributionCsv("1,-0.5\n2,1.5\n").ok());
  EXPECT_FALSE(ParseDistributionCsv("").ok());
}

}  // namespace
}  // namespace cae
