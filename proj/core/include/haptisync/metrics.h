#ifndef HAPTISYNC_METRICS_H_
#define HAPTISYNC_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "haptisync/sync.h"

namespace haptisync {

struct DelayErrorReport {
  double mae_ms = 0.0;
  double max_ae_ms = 0.0;
  size_t n = 0;
};

DelayErrorReport MaeMaxAe(std::span<const double> estimates_ms,
                          std::span<const double> truths_ms);

// Fraction of offsets strictly inside the thresholds.
double SyncProbability(std::span<const double> offsets_ms,
                       const SyncThresholds& th);

struct TwoAfcTrial {
  int64_t n_correct = 0;
  int64_t n_total = 1;
};

double AfcProbability(TwoAfcTrial trial);

// Throw UndefinedCorrelationError on a constant input and InputError on a
// length mismatch or fewer than 2 samples.
double Plcc(std::span<const double> a, std::span<const double> b);
double Srocc(std::span<const double> a, std::span<const double> b);

// 1-based ranks; ties receive the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> v);

// scores[testee][stimulus], each in [0, 10].
struct ScoreMatrix {
  std::vector<std::string> testees;
  std::vector<std::string> stimuli;
  std::vector<std::vector<double>> scores;

  size_t num_testees() const { return scores.size(); }
  size_t num_stimuli() const { return scores.empty() ? 0 : scores[0].size(); }
  void Validate() const;
  // Sub-matrix with the given testee rows.
  ScoreMatrix Select(std::span<const size_t> rows) const;
};

// Per-stimulus mean over all testees.
std::vector<double> MeanOpinionScore(const ScoreMatrix& m);

struct OutlierScreening {
  std::vector<size_t> included;
  std::vector<size_t> excluded;
  std::vector<double> correlation;  // per testee, PLCC against the full MOS
  std::vector<double> mos;          // over the included testees
};

// One pass: testees whose PLCC with the all-testee MOS is below `threshold`
// are excluded and the MOS is recomputed without them. A testee with constant
// scores counts as correlation -1.
OutlierScreening ScreenOutliers(const ScoreMatrix& m, double threshold = 0.7);

enum class CorrelationKind { kPlcc, kSrocc };

struct SaturationPoint {
  int k = 0;
  double correlation = 0.0;
};

// For k = 1..K, the correlation between the mean of k randomly chosen
// testees and the MOS, averaged over `trials` subsets.
std::vector<SaturationPoint> DataSaturation(
    const ScoreMatrix& m, uint64_t rng_seed, int trials = 100,
    CorrelationKind kind = CorrelationKind::kPlcc);

const char* ToString(CorrelationKind kind);
CorrelationKind ParseCorrelationKind(const std::string& name);

}  // namespace haptisync

#endif  // HAPTISYNC_METRICS_H_
