#include "haptisync/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "haptisync/error.h"
#include "haptisync/rng.h"

namespace haptisync {

DelayErrorReport MaeMaxAe(std::span<const double> estimates_ms,
                          std::span<const double> truths_ms) {
  if (estimates_ms.size() != truths_ms.size()) {
    throw InputError("estimates and truths differ in length");
  }
  if (estimates_ms.empty()) throw InputError("need at least one sample");
  DelayErrorReport r;
  r.n = estimates_ms.size();
  double sum = 0.0;
  for (size_t i = 0; i < r.n; ++i) {
    const double e = std::abs(estimates_ms[i] - truths_ms[i]);
    sum += e;
    r.max_ae_ms = std::max(r.max_ae_ms, e);
  }
  r.mae_ms = std::min(sum / double(r.n), r.max_ae_ms);
  return r;
}

double SyncProbability(std::span<const double> offsets_ms, const SyncThresholds& th) {
  if (offsets_ms.empty()) throw InputError("empty offset timeline");
  size_t in = 0;
  for (double o : offsets_ms) in += th.Inside(o) ? 1 : 0;
  return double(in) / double(offsets_ms.size());
}

double AfcProbability(TwoAfcTrial trial) {
  if (trial.n_total < 1 || trial.n_correct < 0 || trial.n_correct > trial.n_total) {
    throw InputError("invalid 2AFC trial counts");
  }
  return double(trial.n_correct) / double(trial.n_total);
}

double Plcc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("correlation inputs differ in length");
  if (a.size() < 2) throw InputError("correlation needs at least two samples");
  const double n = double(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0) {
    throw UndefinedCorrelationError("correlation of a constant series is undefined");
  }
  if (std::equal(a.begin(), a.end(), b.begin())) return 1.0;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  size_t i = 0;
  while (i < idx.size()) {
    size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (double(i) + double(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double Srocc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("correlation inputs differ in length");
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  return Plcc(ra, rb);
}

void ScoreMatrix::Validate() const {
  if (scores.empty() || scores[0].empty()) throw InputError("empty score matrix");
  const size_t cols = scores[0].size();
  for (size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != cols) throw InputError("score matrix is not rectangular");
    for (double s : scores[i]) {
      if (!std::isfinite(s) || s < 0.0 || s > 10.0) {
        throw InputError("score outside [0, 10]");
      }
    }
  }
  if (!testees.empty() && testees.size() != scores.size()) {
    throw InputError("testee names do not match the rows");
  }
  if (!stimuli.empty() && stimuli.size() != cols) {
    throw InputError("stimulus names do not match the columns");
  }
}

ScoreMatrix ScoreMatrix::Select(std::span<const size_t> rows) const {
  ScoreMatrix out;
  out.stimuli = stimuli;
  for (size_t r : rows) {
    if (r >= scores.size()) throw InputError("testee row out of range");
    out.scores.push_back(scores[r]);
    if (!testees.empty()) out.testees.push_back(testees[r]);
  }
  return out;
}

std::vector<double> MeanOpinionScore(const ScoreMatrix& m) {
  m.Validate();
  std::vector<double> mos(m.num_stimuli(), 0.0);
  for (const auto& row : m.scores) {
    for (size_t s = 0; s < row.size(); ++s) mos[s] += row[s];
  }
  for (double& x : mos) x /= double(m.num_testees());
  return mos;
}

OutlierScreening ScreenOutliers(const ScoreMatrix& m, double threshold) {
  m.Validate();
  if (m.num_testees() < 3) throw InputError("outlier screening needs at least 3 testees");
  const std::vector<double> mos = MeanOpinionScore(m);
  OutlierScreening out;
  for (size_t i = 0; i < m.num_testees(); ++i) {
    double r;
    try {
      r = Plcc(m.scores[i], mos);
    } catch (const UndefinedCorrelationError&) {
      // Flat rater counts as -1. Rethrows when the MOS is flat as well.
      Plcc(mos, mos);
      r = -1.0;
    }
    out.correlation.push_back(r);
    (r < threshold ? out.excluded : out.included).push_back(i);
  }
  if (out.included.empty()) throw DegeneratePanelError("every testee was screened out");
  out.mos = MeanOpinionScore(m.Select(out.included));
  return out;
}

std::vector<SaturationPoint> DataSaturation(const ScoreMatrix& m, uint64_t rng_seed,
                                            int trials, CorrelationKind kind) {
  m.Validate();
  const size_t K = m.num_testees();
  if (K < 2) throw InputError("saturation needs at least 2 testees");
  if (trials < 1) throw ConfigError("trials must be positive");
  const std::vector<double> mos = MeanOpinionScore(m);
  const size_t S = m.num_stimuli();
  auto corr = [&](const std::vector<double>& v) {
    return kind == CorrelationKind::kPlcc ? Plcc(v, mos) : Srocc(v, mos);
  };

  Rng rng(rng_seed);
  std::vector<size_t> pool(K);
  std::vector<SaturationPoint> curve;
  for (size_t k = 1; k <= K; ++k) {
    double sum = 0.0;
    int used = 0;
    for (int t = 0; t < trials; ++t) {
      std::iota(pool.begin(), pool.end(), 0);
      for (size_t i = 0; i < k; ++i) {
        const size_t j = static_cast<size_t>(rng.UniformInt(int64_t(i), int64_t(K - 1)));
        std::swap(pool[i], pool[j]);
      }
      std::sort(pool.begin(), pool.begin() + k);
      std::vector<double> mean(S, 0.0);
      for (size_t i = 0; i < k; ++i) {
        for (size_t s = 0; s < S; ++s) mean[s] += m.scores[pool[i]][s];
      }
      for (double& x : mean) x /= double(k);
      try {
        sum += corr(mean);
        ++used;
      } catch (const UndefinedCorrelationError&) {
      }
    }
    curve.push_back({static_cast<int>(k),
                     used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN()});
  }
  return curve;
}

const char* ToString(CorrelationKind kind) {
  return kind == CorrelationKind::kPlcc ? "plcc" : "srocc";
}

CorrelationKind ParseCorrelationKind(const std::string& name) {
  if (name == "plcc") return CorrelationKind::kPlcc;
  if (name == "srocc") return CorrelationKind::kSrocc;
  throw ConfigError("unknown correlation kind '" + name + "'");
}

}  // namespace haptisync
