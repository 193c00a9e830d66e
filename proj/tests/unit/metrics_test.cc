#include "haptisync/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "haptisync/error.h"
#include "oracles.h"

namespace haptisync {
namespace {

std::vector<double> RandomVec(std::mt19937_64& gen, size_t n) {
  std::uniform_real_distribution<double> d(-5, 5);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

TEST(MaeTest, Examples) {
  const std::vector<double> t = {3, -4, 5};
  const DelayErrorReport zero = MaeMaxAe(t, t);
  EXPECT_EQ(zero.mae_ms, 0);
  EXPECT_EQ(zero.max_ae_ms, 0);
  const std::vector<double> e = {10, -10}, z = {0, 0};
  const DelayErrorReport r = MaeMaxAe(e, z);
  EXPECT_DOUBLE_EQ(r.mae_ms, 10);
  EXPECT_DOUBLE_EQ(r.max_ae_ms, 10);
  EXPECT_EQ(r.n, 2u);
  EXPECT_THROW(MaeMaxAe(e, t), InputError);
  EXPECT_THROW(MaeMaxAe({}, {}), InputError);
}

TEST(MaeProperty, BoundedAndPermutationInvariant) {
  std::mt19937_64 gen(20);
  for (int i = 0; i < 500; ++i) {
    const size_t n = 1 + gen() % 30;
    std::vector<double> a = RandomVec(gen, n), b = RandomVec(gen, n);
    const DelayErrorReport r = MaeMaxAe(a, b);
    EXPECT_GE(r.mae_ms, 0);
    EXPECT_LE(r.mae_ms, r.max_ae_ms + 1e-12);
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<double> pa, pb;
    for (size_t k : perm) {
      pa.push_back(a[k]);
      pb.push_back(b[k]);
    }
    const DelayErrorReport p = MaeMaxAe(pa, pb);
    EXPECT_NEAR(p.mae_ms, r.mae_ms, 1e-12);
    EXPECT_EQ(p.max_ae_ms, r.max_ae_ms);
  }
}

TEST(SyncProbabilityTest, Examples) {
  const std::vector<double> zeros(10, 0.0);
  EXPECT_EQ(SyncProbability(zeros, {}), 1.0);
  std::vector<double> half(10, 0.0);
  std::fill(half.begin() + 5, half.end(), 200.0);
  EXPECT_EQ(SyncProbability(half, {}), 0.5);
  const std::vector<double> edges = {-60, 80};
  EXPECT_EQ(SyncProbability(edges, {}), 0.0);
  EXPECT_THROW(SyncProbability({}, {}), InputError);
}

TEST(AfcTest, Examples) {
  EXPECT_EQ(AfcProbability({0, 21}), 0.0);
  EXPECT_EQ(AfcProbability({21, 21}), 1.0);
  EXPECT_NEAR(AfcProbability({7, 21}), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(AfcProbability({22, 21}), InputError);
  EXPECT_THROW(AfcProbability({0, 0}), InputError);
  EXPECT_THROW(AfcProbability({-1, 3}), InputError);
}

TEST(CorrelationTest, Examples) {
  const std::vector<double> a = {1, 4, 2, 8, 5};
  EXPECT_DOUBLE_EQ(Plcc(a, a), 1.0);
  EXPECT_DOUBLE_EQ(Srocc(a, a), 1.0);
  std::vector<double> rev = a;
  std::sort(rev.begin(), rev.end(), std::greater<>());
  std::vector<double> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_DOUBLE_EQ(Srocc(sorted, rev), -1.0);
  const std::vector<double> flat(5, 2.0);
  EXPECT_THROW(Plcc(a, flat), UndefinedCorrelationError);
  EXPECT_THROW(Srocc(flat, a), UndefinedCorrelationError);
  EXPECT_THROW(Plcc(std::vector<double>{1}, std::vector<double>{1}), InputError);
  EXPECT_THROW(Plcc(a, std::vector<double>{1, 2}), InputError);
}

TEST(CorrelationTest, AverageRanksWithTies) {
  const std::vector<double> v = {10, 20, 10, 30, 20, 20};
  EXPECT_EQ(AverageRanks(v), (std::vector<double>{1.5, 4, 1.5, 6, 4, 4}));
  EXPECT_EQ(AverageRanks(v), oracle::Ranks(v));
}

TEST(CorrelationProperty, MatchesOracle) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 100; ++i) {
    const auto a = RandomVec(gen, 20), b = RandomVec(gen, 20);
    EXPECT_NEAR(Plcc(a, b), oracle::Pearson(a, b), 1e-9);
    EXPECT_NEAR(Srocc(a, b), oracle::Spearman(a, b), 1e-9);
  }
}

TEST(CorrelationProperty, MatchesOracleWithTies) {
  std::mt19937_64 gen(22);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(20), b(20);
    for (double& x : a) x = double(gen() % 5);
    for (double& x : b) x = double(gen() % 7);
    EXPECT_NEAR(Srocc(a, b), oracle::Spearman(a, b), 1e-9);
  }
}

TEST(CorrelationProperty, Invariances) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> scale(0.1, 10), shift(-100, 100);
  for (int i = 0; i < 200; ++i) {
    const auto a = RandomVec(gen, 20), b = RandomVec(gen, 20);
    const double s = scale(gen), c = shift(gen);
    std::vector<double> affine, mono;
    for (double x : a) {
      affine.push_back(s * x + c);
      mono.push_back(std::exp(x) + x * x * x);
    }
    EXPECT_NEAR(Plcc(affine, b), Plcc(a, b), 1e-9);
    EXPECT_NEAR(Plcc(b, affine), Plcc(a, b), 1e-9);
    EXPECT_DOUBLE_EQ(Srocc(mono, b), Srocc(a, b));
    EXPECT_NEAR(Plcc(a, b), Plcc(b, a), 1e-15);
  }
}

ScoreMatrix Matrix(std::vector<std::vector<double>> rows) {
  ScoreMatrix m;
  for (size_t i = 0; i < rows.size(); ++i) m.testees.push_back("t" + std::to_string(i));
  for (size_t j = 0; j < rows[0].size(); ++j) m.stimuli.push_back("s" + std::to_string(j));
  m.scores = std::move(rows);
  return m;
}

// Shared signal plus per-testee noise, clamped to the score range.
ScoreMatrix Panel(uint64_t seed, int testees, int stimuli, double noise) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> sig(1, 9);
  std::normal_distribution<double> n(0, noise);
  std::vector<double> truth(stimuli);
  for (double& x : truth) x = sig(gen);
  std::vector<std::vector<double>> rows(testees, std::vector<double>(stimuli));
  for (auto& r : rows) {
    for (int j = 0; j < stimuli; ++j) r[j] = std::clamp(truth[j] + n(gen), 0.0, 10.0);
  }
  return Matrix(rows);
}

TEST(ScoreMatrixTest, Validation) {
  EXPECT_THROW(Matrix({{1, 2}, {3}}).Validate(), InputError);
  EXPECT_THROW(Matrix({{1, 11}}).Validate(), InputError);
  EXPECT_NO_THROW(Matrix({{1, 10}}).Validate());
  EXPECT_EQ(MeanOpinionScore(Matrix({{1, 2}, {3, 6}})), (std::vector<double>{2, 4}));
}

TEST(ScreenOutliersTest, IdenticalTesteesKept) {
  const ScoreMatrix m = Matrix(std::vector<std::vector<double>>(5, {1, 5, 3, 9, 7}));
  const OutlierScreening s = ScreenOutliers(m);
  EXPECT_TRUE(s.excluded.empty());
  EXPECT_EQ(s.included.size(), 5u);
  EXPECT_EQ(s.mos, (std::vector<double>{1, 5, 3, 9, 7}));
}

TEST(ScreenOutliersTest, AntiCorrelatedTesteeExcluded) {
  ScoreMatrix m = Panel(30, 8, 12, 0.4);
  // Row 3 mirrors row 0 around the middle of the scale.
  for (size_t j = 0; j < m.num_stimuli(); ++j) m.scores[3][j] = 10.0 - m.scores[0][j];
  const OutlierScreening s = ScreenOutliers(m);
  EXPECT_EQ(s.excluded, std::vector<size_t>{3});
  const std::vector<double> mos = MeanOpinionScore(m);
  EXPECT_LT(oracle::Pearson(m.scores[3], mos), 0.7);
  for (size_t i = 0; i < m.num_testees(); ++i) {
    EXPECT_NEAR(s.correlation[i], oracle::Pearson(m.scores[i], mos), 1e-9);
  }
  std::vector<size_t> keep = {0, 1, 2, 4, 5, 6, 7};
  EXPECT_EQ(s.mos, MeanOpinionScore(m.Select(keep)));
}

TEST(ScreenOutliersTest, FlatRaterAndErrors) {
  ScoreMatrix m = Panel(31, 5, 10, 0.3);
  m.scores[2].assign(10, 5.0);
  EXPECT_EQ(ScreenOutliers(m).excluded, std::vector<size_t>{2});
  EXPECT_THROW(ScreenOutliers(Panel(1, 2, 5, 0.1)), InputError);
  EXPECT_THROW(ScreenOutliers(Panel(1, 4, 5, 0.1), 1.1), DegeneratePanelError);
}

TEST(DataSaturationTest, EndpointIsExactlyOne) {
  const ScoreMatrix m = Panel(40, 23, 12, 1.5);
  const auto curve = DataSaturation(m, 7, 50);
  ASSERT_EQ(curve.size(), 23u);
  EXPECT_EQ(curve.back().k, 23);
  EXPECT_EQ(curve.back().correlation, 1.0);
  EXPECT_EQ(DataSaturation(m, 7, 50, CorrelationKind::kSrocc).back().correlation, 1.0);
}

TEST(DataSaturationTest, IdenticalTesteesGiveOne) {
  const ScoreMatrix m = Matrix(std::vector<std::vector<double>>(6, {2, 8, 4, 6}));
  for (const SaturationPoint& p : DataSaturation(m, 1, 20)) EXPECT_EQ(p.correlation, 1.0);
}

TEST(DataSaturationTest, CurveRisesAndCrossesBeforeK) {
  const ScoreMatrix m = Panel(41, 23, 12, 1.5);
  const auto curve = DataSaturation(m, 9, 200);
  int cross = 0;
  for (const SaturationPoint& p : curve) {
    if (p.correlation >= 0.99) {
      cross = p.k;
      break;
    }
  }
  EXPECT_GT(cross, 0);
  EXPECT_LT(cross, 23);
  EXPECT_LT(curve.front().correlation, curve[curve.size() / 2].correlation);
  EXPECT_EQ(DataSaturation(m, 9, 200).front().correlation, curve.front().correlation);
}

TEST(DataSaturationTest, Errors) {
  EXPECT_THROW(DataSaturation(Panel(1, 1, 4, 0.1), 1), InputError);
  EXPECT_THROW(DataSaturation(Panel(1, 3, 4, 0.1), 1, 0), ConfigError);
  EXPECT_EQ(ParseCorrelationKind("srocc"), CorrelationKind::kSrocc);
  EXPECT_THROW(ParseCorrelationKind("kendall"), ConfigError);
}

}  // namespace
}  // namespace haptisync
