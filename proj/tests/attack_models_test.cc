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

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "cae/entropy.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace cae {
namespace {

using ::cae::testing::EnumerateIntegerBounds;
using ::cae::testing::IntegerBounds;

constexpr double kSumTolerance = 1e-9;

Schema TinySchema() {
  return *Schema::Create({
      {.name = "Salary", .min = 10, .max = 50, .rounding = 10,
       .confidential = true},
      {.name = "Age", .min = 20, .max = 23},
      {.name = "Sex", .min = 1, .max = 2, .kind = AttributeKind::kCategorical},
  });
}

double Total(const ValueDistribution& dist) {
  return std::accumulate(dist.probs().begin(), dist.probs().end(), 0.0);
}

double ProbabilityOf(const ValueDistribution& dist, int64_t value) {
  for (size_t i = 0; i < dist.size(); ++i) {
    if (dist.values()[i] == value) return dist.probs()[i];
  }
  return 0.0;
}

// ---- Sampling ----

TEST(DrawSampleTest, SizeAndDeterminism) {
  Rng rng(1);
  const Dataset data = GenerateSynthetic(PumsSchema(), 200, rng);
  Rng a(5), b(5);
  auto first = DrawSample(data, 10, a);
  ASSERT_TRUE(first.ok());
  EXPECT_EQ(first->num_records(), 20u);
  EXPECT_EQ(first->rows(), DrawSample(data, 10, b)->rows());
  Rng c(5);
  EXPECT_EQ(DrawSample(data, 100, c)->rows(), data.rows());
  Rng d(5);
  EXPECT_FALSE(DrawSample(data, 0.1, d).ok());
  EXPECT_FALSE(DrawSample(data, 120, d).ok());
}

TEST(SamplingPosteriorTest, PartiallySampledMatches) {
  // |M_o| = 4, two sampled matches both at 30, |D| = 25.
  const Schema schema = PumsSchema();
  const std::vector<int64_t> domain = schema.confidential().DomainValues();
  std::vector<int64_t> match = {30, 40, 1, 12, 3, 4, 20};
  std::vector<int64_t> other = {200, 41, 2, 12, 3, 4, 20};
  auto sample = *Dataset::Create(schema, {match, match, other});
  SupplementaryKnowledge sk{.known = {{"Age", 40}},
                            .original_match_count = 4};
  auto posterior = SamplingPosterior(sample, sk, domain);
  ASSERT_TRUE(posterior.ok()) << posterior.status();
  ASSERT_EQ(posterior->size(), 25u);
  EXPECT_NEAR(ProbabilityOf(*posterior, 30), 0.52, 1e-12);
  for (int64_t v : domain) {
    if (v != 30) EXPECT_NEAR(ProbabilityOf(*posterior, v), 0.02, 1e-12);
  }
  EXPECT_NEAR(Total(*posterior), 1.0, kSumTolerance);

  // Record-inclusion simulation: the target is a uniform member of M_o; when
  // it is one of the sampled matches its value is that record's, otherwise
  // the intruder has no information and every domain value is equally
  // likely.
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> member(0, 3);
  std::uniform_int_distribution<size_t> any(0, domain.size() - 1);
  const int trials = 400000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const int64_t value = member(rng) < 2 ? 30 : domain[any(rng)];
    if (value == 30) ++hits;
  }
  const double freq = static_cast<double>(hits) / trials;
  EXPECT_NEAR(freq, 0.52, 4 * std::sqrt(0.52 * 0.48 / trials));
}

TEST(SamplingPosteriorTest, FullySampledTwoMatches) {
  const Schema schema = PumsSchema();
  auto sample = *Dataset::Create(
      schema, {{50, 40, 1, 12, 3, 4, 20}, {110, 40, 2, 12, 3, 4, 20}});
  SupplementaryKnowledge sk{.known = {{"Age", 40}},
                            .original_match_count = 2};
  auto posterior =
      SamplingPosterior(sample, sk, schema.confidential().DomainValues());
  ASSERT_TRUE(posterior.ok());
  EXPECT_EQ(std::vector<int64_t>(posterior->values().begin(),
                                 posterior->values().end()),
            (std::vector<int64_t>{50, 110}));
  EXPECT_DOUBLE_EQ(posterior->probs()[0], 0.5);
}

TEST(SamplingPosteriorTest, NoSampledMatchIsUniform) {
  const Schema schema = PumsSchema();
  auto sample = *Dataset::Create(schema, {{50, 40, 1, 12, 3, 4, 20}});
  SupplementaryKnowledge sk{.known = {{"Age", 41}},
                            .original_match_count = 3};
  auto posterior =
      SamplingPosterior(sample, sk, schema.confidential().DomainValues());
  ASSERT_TRUE(posterior.ok());
  ASSERT_EQ(posterior->size(), 25u);
  for (double p : posterior->probs()) EXPECT_NEAR(p, 0.04, 1e-12);
}

TEST(SamplingPosteriorTest, Errors) {
  const Schema schema = PumsSchema();
  const auto domain = schema.confidential().DomainValues();
  auto sample = *Dataset::Create(
      schema, {{50, 40, 1, 12, 3, 4, 20}, {60, 40, 1, 12, 3, 4, 20}});
  EXPECT_EQ(SamplingPosterior(sample, {.known = {}, .original_match_count = 0},
                              domain)
                .status()
                .code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(SamplingPosterior(sample, {.known = {}, .original_match_count = 1},
                              domain)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

// ---- Query restriction ----

TEST(BuildQuerySystemTest, EightRecordsQueryFour) {
  Rng data_rng(2);
  const Dataset data = GenerateSynthetic(TinySchema(), 8, data_rng);
  Rng rng(3);
  auto release = BuildQuerySystem(data, 4, rng);
  ASSERT_TRUE(release.ok());
  const auto& eqs = release->system.equations();
  ASSERT_EQ(eqs.size(), 3u);
  for (size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(eqs[e].begin, 2 * e);
    EXPECT_EQ(eqs[e].length, 4u);
  }
  // Every answer is exact.
  std::vector<int64_t> at_position(8);
  for (size_t r = 0; r < 8; ++r) {
    at_position[release->position_of_record[r]] = data.confidential_value(r);
  }
  for (const RangeEquation& eq : eqs) {
    int64_t sum = 0;
    for (size_t p = eq.begin; p < eq.begin + eq.length; ++p) {
      sum += at_position[p];
    }
    EXPECT_EQ(sum, eq.sum);
  }
}

TEST(BuildQuerySystemTest, EquationCount) {
  Rng data_rng(4);
  const Dataset data = GenerateSynthetic(PumsSchema(), 2500, data_rng);
  Rng rng(5);
  EXPECT_EQ(BuildQuerySystem(data, 2, rng)->system.equations().size(), 2499u);
  EXPECT_EQ(BuildQuerySystem(data, 32, rng)->system.equations().size(), 155u);
  EXPECT_FALSE(BuildQuerySystem(data, 3, rng).ok());
  EXPECT_FALSE(BuildQuerySystem(data, 0, rng).ok());
  EXPECT_FALSE(BuildQuerySystem(data, 2502, rng).ok());
}

// Release with the identity record-to-position map.
QueryRelease IdentityRelease(const Dataset& data,
                             std::vector<RangeEquation> eqs) {
  const auto domain = data.schema().confidential().DomainValues();
  std::vector<size_t> positions(data.num_records());
  std::iota(positions.begin(), positions.end(), size_t{0});
  return QueryRelease{
      .system = *QuerySystem::Create(data.num_records(), std::move(eqs),
                                     domain.front(), domain.back()),
      .position_of_record = positions};
}

TEST(QueryRestrictionPosteriorTest, FullyDeterminedSystem) {
  auto data = *Dataset::Create(TinySchema(), {{10, 20, 1},
                                               {40, 20, 2},
                                               {40, 21, 1},
                                               {50, 20, 1}});
  // Prefix sums of every length are independent and pin every value.
  std::vector<RangeEquation> eqs;
  int64_t sum = 0;
  for (size_t i = 0; i < 4; ++i) {
    sum += data.confidential_value(i);
    eqs.push_back({0, i + 1, sum});
  }
  const QueryRelease release = IdentityRelease(data, eqs);
  auto solver = *BoundsSolver::Create(release.system);
  for (size_t r = 0; r < 4; ++r) {
    const Bounds b = solver.Solve(r);
    EXPECT_EQ(b.lower, data.confidential_value(r));
    EXPECT_EQ(b.upper, data.confidential_value(r));
  }
  const auto domain = data.schema().confidential().DomainValues();
  auto posterior = QueryRestrictionPosterior(
      release, data, {.known = {{"Age", 20}}}, domain);
  ASSERT_TRUE(posterior.ok());
  EXPECT_EQ(std::vector<int64_t>(posterior->values().begin(),
                                 posterior->values().end()),
            (std::vector<int64_t>{10, 40, 50}));
  for (double p : posterior->probs()) EXPECT_NEAR(p, 1.0 / 3, 1e-12);
}

TEST(QueryRestrictionPosteriorTest, NoEquationsIsUniform) {
  auto data = *Dataset::Create(TinySchema(), {{10, 20, 1}, {40, 20, 2}});
  const auto domain = data.schema().confidential().DomainValues();
  auto posterior = QueryRestrictionPosterior(IdentityRelease(data, {}), data,
                                             {.known = {}}, domain);
  ASSERT_TRUE(posterior.ok());
  ASSERT_EQ(posterior->size(), 5u);
  for (double p : posterior->probs()) EXPECT_NEAR(p, 0.2, 1e-12);
}

TEST(QueryRestrictionPosteriorTest, HandEnumeratedFourRecords) {
  // Records 0 and 1 share one equation summing to 90; the target matches
  // records 0 and 2.
  auto data = *Dataset::Create(TinySchema(), {{40, 20, 1},
                                               {50, 21, 1},
                                               {20, 20, 2},
                                               {30, 22, 2}});
  const QueryRelease release = IdentityRelease(data, {{0, 2, 90}});
  IntegerBounds exact;
  ASSERT_TRUE(EnumerateIntegerBounds(release.system, &exact));
  EXPECT_EQ(exact.min[0], 40);
  EXPECT_EQ(exact.max[0], 50);
  EXPECT_EQ(exact.min[2], 10);
  EXPECT_EQ(exact.max[2], 50);

  const auto domain = data.schema().confidential().DomainValues();
  auto posterior = QueryRestrictionPosterior(
      release, data, {.known = {{"Age", 20}}}, domain);
  ASSERT_TRUE(posterior.ok());
  // Record 0: 1/2 * 1/2 on {40, 50}; record 2: 1/2 * 1/5 on every value.
  const std::map<int64_t, double> expected = {
      {10, 0.1}, {20, 0.1}, {30, 0.1}, {40, 0.35}, {50, 0.35}};
  for (const auto& [value, p] : expected) {
    EXPECT_NEAR(ProbabilityOf(*posterior, value), p, 1e-12) << value;
  }
}

TEST(QueryRestrictionPosteriorTest, NoMatchIsNotFound) {
  auto data = *Dataset::Create(TinySchema(), {{10, 20, 1}, {40, 20, 2}});
  const auto domain = data.schema().confidential().DomainValues();
  EXPECT_EQ(QueryRestrictionPosterior(IdentityRelease(data, {}), data,
                                      {.known = {{"Age", 23}}}, domain)
                .status()
                .code(),
            absl::StatusCode::kNotFound);
}

// ---- Noise ----

TEST(MaxNoiseTest, NearestEvenTiesUp) {
  EXPECT_EQ(MaxNoise(10, 25), 2);   // 2.4
  EXPECT_EQ(MaxNoise(25, 25), 6);   // 6
  EXPECT_EQ(MaxNoise(50, 25), 12);  // 12
  EXPECT_EQ(MaxNoise(100, 25), 24);
  EXPECT_EQ(MaxNoise(10, 69), 6);   // 6.8
  EXPECT_EQ(MaxNoise(100, 2), 2);   // 1, a tie between 0 and 2
  EXPECT_EQ(MaxNoise(50, 2), 0);    // 0.5
  EXPECT_EQ(MaxNoise(0, 177), 0);
  EXPECT_EQ(MaxNoise(100, 1), 0);
}

TEST(MakeNoiseSpecTest, UsesRoundingStep) {
  auto spec = MakeNoiseSpec(PumsSchema(), 25);
  ASSERT_TRUE(spec.ok());
  EXPECT_EQ(spec->attributes[0].max_noise, 6);
  EXPECT_EQ(spec->attributes[0].step, 10);
  EXPECT_EQ(spec->attributes[1].step, 1);
  EXPECT_FALSE(MakeNoiseSpec(PumsSchema(), -1).ok());
}

TEST(CenteredBinomialPmfTest, Values) {
  EXPECT_DOUBLE_EQ(CenteredBinomialPmf(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(CenteredBinomialPmf(2, 1), 0.25);
  EXPECT_DOUBLE_EQ(CenteredBinomialPmf(2, -1), 0.25);
  EXPECT_EQ(CenteredBinomialPmf(2, 2), 0.0);
  EXPECT_EQ(CenteredBinomialPmf(3, 0), 0.0);
  EXPECT_EQ(CenteredBinomialPmf(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(CenteredBinomialPmf(10, 0), 252.0 / 1024);
}

TEST(CenteredBinomialPmfTest, SumsToOne) {
  for (int64_t m = 0; m <= 200; m += 2) {
    double total = 0;
    for (int64_t off = -m / 2 - 1; off <= m / 2 + 1; ++off) {
      total += CenteredBinomialPmf(m, off);
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << m;
  }
}

TEST(PerturbDatasetTest, ZeroNoiseIsIdentity) {
  Rng data_rng(6);
  const Dataset data = GenerateSynthetic(PumsSchema(), 100, data_rng);
  Rng rng(7);
  auto perturbed = PerturbDataset(data, *MakeNoiseSpec(data.schema(), 0), rng);
  ASSERT_TRUE(perturbed.ok());
  EXPECT_EQ(perturbed->rows(), data.rows());
}

TEST(PerturbDatasetTest, NoiseHistogramMatchesPmf) {
  Rng data_rng(8);
  const Dataset data = GenerateSynthetic(TinySchema(), 34000, data_rng);
  const int64_t m = 6;
  NoiseSpec spec{.percent = 0,
                 .attributes = {{m, 10}, {m, 1}, {m, 1}}};
  Rng rng(9);
  auto perturbed = PerturbDataset(data, spec, rng);
  ASSERT_TRUE(perturbed.ok());
  std::map<int64_t, int> histogram;
  size_t cells = 0;
  for (size_t r = 0; r < data.num_records(); ++r) {
    for (size_t a = 0; a < 3; ++a) {
      const int64_t delta = perturbed->cell(r, a) - data.cell(r, a);
      ASSERT_EQ(delta % spec.attributes[a].step, 0);
      ++histogram[delta / spec.attributes[a].step];
      ++cells;
    }
  }
  ASSERT_GE(cells, 100000u);
  double chi2 = 0;
  for (int64_t off = -m / 2; off <= m / 2; ++off) {
    const double p = CenteredBinomialPmf(m, off);
    const double expected = p * static_cast<double>(cells);
    const double observed = histogram[off];
    EXPECT_LE(std::abs(observed - expected),
              3 * std::sqrt(expected * (1 - p)))
        << "offset " << off;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  EXPECT_EQ(histogram.size(), static_cast<size_t>(m + 1));
  // 99.9th percentile of chi-square with 6 degrees of freedom.
  EXPECT_LT(chi2, 22.46);
}

TEST(NoisePosteriorTest, ZeroNoiseIsExactMatching) {
  auto data = *Dataset::Create(TinySchema(), {{10, 20, 1},
                                               {40, 20, 2},
                                               {40, 20, 1},
                                               {50, 21, 1}});
  const NoiseSpec spec = *MakeNoiseSpec(data.schema(), 0);
  auto posterior = NoisePosterior(data, {.known = {{"Age", 20}}}, spec,
                                  data.schema().confidential().DomainValues());
  ASSERT_TRUE(posterior.ok());
  EXPECT_EQ(std::vector<int64_t>(posterior->values().begin(),
                                 posterior->values().end()),
            (std::vector<int64_t>{10, 40}));
  EXPECT_NEAR(posterior->probs()[0], 1.0 / 3, 1e-12);
  EXPECT_NEAR(posterior->probs()[1], 2.0 / 3, 1e-12);
}

TEST(NoisePosteriorTest, SingleRecordWithUnitNoise) {
  // Perturbed record: Salary 30, Age 21, with m = 2 on every attribute.
  auto perturbed = *Dataset::Create(TinySchema(), {{30, 21, 1}});
  NoiseSpec spec{.percent = 0, .attributes = {{2, 10}, {2, 1}, {2, 1}}};
  const auto domain = perturbed.schema().confidential().DomainValues();
  for (int64_t age : {20, 21, 22}) {
    auto posterior =
        NoisePosterior(perturbed, {.known = {{"Age", age}}}, spec, domain);
    ASSERT_TRUE(posterior.ok());
    EXPECT_EQ(std::vector<int64_t>(posterior->values().begin(),
                                   posterior->values().end()),
              (std::vector<int64_t>{20, 30, 40}));
    EXPECT_DOUBLE_EQ(posterior->probs()[0], 0.25);
    EXPECT_DOUBLE_EQ(posterior->probs()[1], 0.5);
    EXPECT_DOUBLE_EQ(posterior->probs()[2], 0.25);
  }
  EXPECT_EQ(NoisePosterior(perturbed, {.known = {{"Age", 23}}}, spec, domain)
                .status()
                .code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(NoisePosterior(perturbed, {.known = {{"Salary", 30}}}, spec, domain)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

// ---- Randomized validity of all three constructors ----

class PosteriorValidityTest : public ::testing::Test {
 protected:
  // Picks a random record and reveals a random subset of its
  // quasi-identifiers.
  static KnownValues RandomKnowledge(const Dataset& data, Rng& rng) {
    const size_t target =
        std::uniform_int_distribution<size_t>(0, data.num_records() - 1)(rng);
    KnownValues known;
    for (size_t a : data.schema().QuasiIdentifiers()) {
      if (rng() & 1) {
        known[data.schema().attribute(a).name] = data.cell(target, a);
      }
    }
    return known;
  }

  static void ExpectValid(const ValueDistribution& dist) {
    EXPECT_NEAR(Total(dist), 1.0, kSumTolerance);
    for (size_t i = 0; i < dist.size(); ++i) {
      EXPECT_GT(dist.probs()[i], 0.0);
      if (i > 0) EXPECT_LT(dist.values()[i - 1], dist.values()[i]);
    }
  }
};

TEST_F(PosteriorValidityTest, Sampling) {
  Rng rng(100);
  const Dataset data = GenerateSynthetic(PumsSchema(), 300, rng);
  const auto domain = data.schema().confidential().DomainValues();
  for (int trial = 0; trial < 120; ++trial) {
    const KnownValues known = RandomKnowledge(data, rng);
    const size_t m_o = MatchRecords(data, known)->size();
    auto sample = *DrawSample(data, 5 + trial % 90, rng);
    auto posterior = SamplingPosterior(
        sample, {.known = known, .original_match_count = m_o}, domain);
    ASSERT_TRUE(posterior.ok()) << posterior.status();
    ExpectValid(*posterior);
  }
}

TEST_F(PosteriorValidityTest, QueryRestriction) {
  Rng rng(101);
  const Dataset data = GenerateSynthetic(PumsSchema(), 120, rng);
  const auto domain = data.schema().confidential().DomainValues();
  for (int trial = 0; trial < 120; ++trial) {
    auto release = *BuildQuerySystem(data, size_t{2} << (trial % 5), rng);
    auto posterior = QueryRestrictionPosterior(
        release, data, {.known = RandomKnowledge(data, rng)}, domain);
    ASSERT_TRUE(posterior.ok()) << posterior.status();
    ExpectValid(*posterior);
  }
}

TEST_F(PosteriorValidityTest, Noise) {
  Rng rng(102);
  const Dataset data = GenerateSynthetic(PumsSchema(), 300, rng);
  const auto domain = data.schema().confidential().DomainValues();
  const double percents[] = {0, 10, 25, 50, 100};
  int formed = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const NoiseSpec spec = *MakeNoiseSpec(data.schema(), percents[trial % 5]);
    auto perturbed = *PerturbDataset(data, spec, rng);
    auto posterior = NoisePosterior(
        perturbed, {.known = RandomKnowledge(data, rng)}, spec, domain);
    if (!posterior.ok()) {
      EXPECT_EQ(posterior.status().code(), absl::StatusCode::kNotFound);
      continue;
    }
    ++formed;
    ExpectValid(*posterior);
  }
  EXPECT_GE(formed, 100);
}

// ---- Complete compromise ----

TEST(FullCompromiseTest, FullSampleWithUniqueKnowledge) {
  Rng rng(200);
  const Dataset data = GenerateSynthetic(PumsSchema(), 300, rng);
  const auto domain = data.schema().confidential().DomainValues();
  auto sample = *DrawSample(data, 100, rng);
  int unique = 0;
  for (size_t target = 0; target < data.num_records(); ++target) {
    KnownValues known;
    for (size_t a : data.schema().QuasiIdentifiers()) {
      known[data.schema().attribute(a).name] = data.cell(target, a);
    }
    if (MatchRecords(data, known)->size() != 1) continue;
    ++unique;
    auto posterior = SamplingPosterior(
        sample, {.known = known, .original_match_count = 1}, domain);
    ASSERT_TRUE(posterior.ok());
    EXPECT_EQ(ComputeRiskReport(*posterior).h0, 0.0);
  }
  EXPECT_GT(unique, 0);
}

TEST(FullCompromiseTest, ZeroNoiseWithUniqueKnowledge) {
  Rng rng(201);
  const Dataset data = GenerateSynthetic(PumsSchema(), 300, rng);
  const auto domain = data.schema().confidential().DomainValues();
  const NoiseSpec spec = *MakeNoiseSpec(data.schema(), 0);
  auto perturbed = *PerturbDataset(data, spec, rng);
  for (size_t target = 0; target < 50; ++target) {
    KnownValues known;
    for (size_t a : data.schema().QuasiIdentifiers()) {
      known[data.schema().attribute(a).name] = data.cell(target, a);
    }
    if (MatchRecords(data, known)->size() != 1) continue;
    auto posterior = NoisePosterior(perturbed, {.known = known}, spec, domain);
    ASSERT_TRUE(posterior.ok());
    EXPECT_EQ(ComputeRiskReport(*posterior).h0, 0.0);
    EXPECT_EQ(posterior->values()[0], data.confidential_value(target));
  }
}

}  // namespace
}  // namespace cae
