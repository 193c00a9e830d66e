// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "haptisync/error.h"
#include "haptisync/experiment.h"
#include "haptisync/haptic.h"
#include "haptisync/metrics.h"
#include "haptisync/packet.h"
#include "haptisync/sync.h"
#include "haptisync/vision.h"
#include "oracles.h"

namespace {

using namespace haptisync;

constexpr double kT = 1000.0 / 30.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool BitIdentical(const HapticTrace& a, const HapticTrace& b) {
  if (a.size() != b.size() || a.rate_hz != b.rate_hz) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const HapticSample& x = a.samples[i];
    const HapticSample& y = b.samples[i];
    const double xs[4] = {x.t, x.fx, x.fy, x.fz}, ys[4] = {y.t, y.fx, y.fy, y.fz};
    if (std::memcmp(xs, ys, sizeof xs) != 0) return false;
  }
  return true;
}

// Haptic-invariance evidence collected from every end-to-end run below.
int g_runs_checked = 0;
int g_runs_differing = 0;

void RecordInvariance(const std::vector<ClipResult>& clips) {
  for (const ClipResult& c : clips) {
    ++g_runs_checked;
    g_runs_differing += !c.haptic_identical;
  }
}

Outcome DelayEstimation() {
  ExperimentConfig cfg;
  cfg.clips = 10;
  cfg.seed = 2024;
  cfg.correction = false;
  cfg.schedule.kind = ScheduleKind::kConstant;  // one draw from [-10, 10] per clip
  const auto start = Clock::now();
  const std::vector<ClipResult> clips = RunClips(cfg);
  const double secs = Seconds(start);
  RecordInvariance(clips);

  Outcome o;
  std::vector<double> est, truth;
  std::string injected;
  for (const ClipResult& c : clips) {
    const double t = c.schedule.entries.at(0).d_n * kT;
    const double e = c.EstimatedDelayMs();
    injected += (injected.empty() ? "" : ",") + std::to_string(c.schedule.entries[0].d_n);
    if (std::isnan(e) || std::abs(e - t) > kT / 2) {
      o.pass = false;
      o.detail += "clip " + std::to_string(c.clip_id) + " off by " + Fmt("%.2f ms; ", e - t);
      continue;
    }
    est.push_back(e);
    truth.push_back(t);
  }
  const DelayErrorReport r = est.empty() ? DelayErrorReport{} : MaeMaxAe(est, truth);
  o.pass = o.pass && r.mae_ms <= kT && secs < 30.0;

  // Every value in the range, one clip each.
  double sweep_worst = 0;
  cfg.clips = 1;
  cfg.schedule.has_constant = true;
  for (int d = -kMaxDelayFrames; d <= kMaxDelayFrames; ++d) {
    cfg.schedule.constant_frames = d;
    const std::vector<ClipResult> one = RunClips(cfg);
    RecordInvariance(one);
    const double err = std::abs(one[0].EstimatedDelayMs() - d * kT);
    sweep_worst = std::isnan(err) ? INFINITY : std::max(sweep_worst, err);
  }
  o.pass = o.pass && sweep_worst <= kT / 2;
  o.detail += "injected {" + injected + "} frames, MAE " + Fmt("%.3f ms", r.mae_ms) +
              Fmt(", MaxAE %.3f ms", r.max_ae_ms) +
              Fmt(" (per-clip bound 16.7 ms, MAE bound 33.3 ms), %.2f s", secs) +
              Fmt("; sweep -10..+10 worst error %.3f ms", sweep_worst);
  return o;
}

Outcome SyncProbabilityGap() {
  ExperimentConfig cfg;
  cfg.clips = 10;
  cfg.seed = 1;
  cfg.schedule.kind = ScheduleKind::kRandom;
  const auto start = Clock::now();
  SessionReport rep;
  rep.config = cfg;
  rep.clips = RunClips(cfg);
  const double secs = Seconds(start);
  RecordInvariance(rep.clips);
  const double on = rep.MeanSyncOn(), off = rep.MeanSyncOff();
  Outcome o;
  o.pass = on >= 0.80 && off <= 0.45 && on - off >= 0.35 && secs < 60.0;
  o.detail = Fmt("ON %.4f (>= 0.80)", on) + Fmt(", OFF %.4f (<= 0.45)", off) +
             Fmt(", gap %.4f (>= 0.35)", on - off) + Fmt(", %.2f s", secs);
  return o;
}

Outcome CollisionOracle() {
  std::mt19937_64 gen(64);
  int agree = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    auto coord = [&] { return double(gen() % 64); };
    auto size = [&] { return double(1 + gen() % 32); };
    const BoundingBox a{coord(), coord(), size(), size(), "ball"};
    const BoundingBox b{coord(), coord(), size(), size(), "box"};
    agree += RectsCollide(a, b) ==
             oracle::RasterOverlap(a.x, a.y, a.w, a.h, b.x, b.y, b.w, b.h, 96);
  }
  return {agree == n, std::to_string(agree) + "/" + std::to_string(n) + " pairs agree"};
}

Outcome ThresholdClassification() {
  const std::vector<double> d = {-100, -60, -59.9, 0, 79.9, 80, 100};
  const std::vector<SyncStatus> want = {
      SyncStatus::kVisualLeads, SyncStatus::kVisualLeads, SyncStatus::kInSync,
      SyncStatus::kInSync,      SyncStatus::kInSync,      SyncStatus::kVisualLags,
      SyncStatus::kVisualLags};
  Outcome o;
  for (size_t i = 0; i < d.size(); ++i) {
    const SyncStatus got = CheckSync({d[i]}, SyncThresholds{-60, 80});
    o.pass = o.pass && got == want[i];
    o.detail += (i ? ", " : "") + Fmt("%g", d[i]) + "->" + ToString(got);
  }
  return o;
}

Outcome FilterProperties() {
  double worst_sum = 0, worst_const = 0;
  for (int size : {3, 5, 7}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const std::vector<double> w = GaussianKernel(size, sigma);
      double s = 0;
      for (double x : w) s += x;
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
      HapticTrace tr;
      for (int i = 0; i < 200; ++i) tr.samples.push_back({i / 1000.0, 0.3, -1.25, 7.0});
      const HapticTrace out = GaussianSmooth(tr, size, sigma);
      for (const HapticSample& h : out.samples) {
        worst_const = std::max({worst_const, std::abs(h.fx - 0.3), std::abs(h.fy + 1.25),
                                std::abs(h.fz - 7.0)});
      }
    }
  }
  return {worst_sum <= 1e-12 && worst_const <= 1e-9,
          Fmt("max |sum-1| %.3g (<= 1e-12)", worst_sum) +
              Fmt(", max constant drift %.3g (<= 1e-9)", worst_const)};
}

Outcome AdjustmentOptimality() {
  std::mt19937_64 gen(500);
  std::uniform_real_distribution<double> dist(-500, 500);
  const SyncThresholds th;
  int ok = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const double d = dist(gen);
    const Adjustment a = PlanAdjustment({d}, th, kT);
    bool good;
    if (th.Inside(d)) {
      good = a.direction == AdjustDirection::kNone && a.ticks == 0;
    } else {
      const bool adv = d >= th.d_beta_ms;
      const double landed = adv ? d - a.ticks * kT : d + a.ticks * kT;
      good = a.direction == (adv ? AdjustDirection::kAdvance : AdjustDirection::kRepeat) &&
             a.ticks == oracle::SmallestTicks(d, th.d_alpha_ms, th.d_beta_ms, kT, adv) &&
             th.Inside(landed);
    }
    ok += good;
  }
  return {ok == n, std::to_string(ok) + "/" + std::to_string(n) + " minimal and inside"};
}

Outcome Statistics() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-10, 10);
  double worst = 0;
  bool invariant = true;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(20), b(20), ta(20);
    for (double& x : a) x = u(gen);
    for (double& x : b) x = u(gen);
    for (int k = 0; k < 20; ++k) ta[k] = std::exp(a[k] / 4) + 3 * a[k];
    worst = std::max({worst, std::abs(Plcc(a, b) - oracle::Pearson(a, b)),
                      std::abs(Srocc(a, b) - oracle::Spearman(a, b))});
    invariant = invariant && Srocc(ta, b) == Srocc(a, b);
  }

  // 12 raters share a signal; rater 4 scores its mirror image.
  std::normal_distribution<double> noise(0, 0.6);
  std::vector<double> signal(15);
  for (double& x : signal) x = 2 + 6 * std::uniform_real_distribution<double>(0, 1)(gen);
  ScoreMatrix m;
  for (int t = 0; t < 12; ++t) {
    m.testees.push_back("r" + std::to_string(t));
    std::vector<double> row;
    for (double s : signal) {
      const double v = t == 4 ? 10 - s : s + noise(gen);
      row.push_back(std::clamp(v, 0.0, 10.0));
    }
    m.scores.push_back(row);
  }
  for (int s = 0; s < 15; ++s) m.stimuli.push_back("s" + std::to_string(s));
  const OutlierScreening scr = ScreenOutliers(m);
  const bool screened = scr.excluded == std::vector<size_t>{4} &&
                        oracle::Pearson(m.scores[4], MeanOpinionScore(m)) < 0.7;
  const double endpoint = DataSaturation(m, 3, 100).back().correlation;

  return {worst <= 1e-9 && invariant && endpoint == 1.0 && screened,
          Fmt("max oracle diff %.3g (<= 1e-9)", worst) +
              ", SROCC monotone-invariant " + (invariant ? "yes" : "no") +
              Fmt(", saturation endpoint %.17g", endpoint) +
              ", anti-correlated rater excluded " + (screened ? "yes" : "no")};
}

DecodeError::Kind KindOf(const std::vector<uint8_t>& bytes, bool* threw) {
  try {
    DecodePacket(bytes);
  } catch (const DecodeError& e) {
    *threw = true;
    return e.kind();
  }
  *threw = false;
  return DecodeError::Kind::kBadPayload;
}

Outcome DeterminismAndCodec() {
  ExperimentConfig cfg;
  cfg.clips = 3;
  cfg.seed = 99;
  cfg.threads = 1;
  const SessionReport r1 = RunSession(cfg);
  cfg.threads = 3;
  const SessionReport r2 = RunSession(cfg);
  RecordInvariance(r1.clips);
  RecordInvariance(r2.clips);
  const bool identical = r1.Dump() == r2.Dump();

  std::mt19937_64 gen(10000);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    Packet p;
    p.stream = gen() % 2 ? StreamId::kHaptic : StreamId::kVisual;
    p.seq = static_cast<uint32_t>(gen());
    p.payload.resize(gen() % 1024);
    for (uint8_t& b : p.payload) b = static_cast<uint8_t>(gen());
    mismatches += DecodePacket(EncodePacket(p)) != p;
  }

  const std::vector<uint8_t> good = EncodePacket({StreamId::kHaptic, 1, std::vector<uint8_t>(12)});
  auto magic = good;
  magic[1] ^= 0xFF;
  auto truncated = good;
  truncated.resize(good.size() - 3);
  auto stream = good;
  stream[3] = 7;
  bool t1, t2, t3;
  const auto k1 = KindOf(magic, &t1), k2 = KindOf(truncated, &t2), k3 = KindOf(stream, &t3);
  const bool distinct = t1 && t2 && t3 && k1 == DecodeError::Kind::kBadMagic &&
                        k2 == DecodeError::Kind::kTruncated &&
                        k3 == DecodeError::Kind::kUnknownStream;
  return {identical && mismatches == 0 && distinct,
          std::string("reports byte-identical ") + (identical ? "yes" : "no") + ", " +
              std::to_string(mismatches) + "/10000 codec mismatches, malformed classes " +
              (distinct ? "distinct" : "NOT distinct")};
}

Outcome HapticInvariance() {
  // Independent bitwise check on top of the per-run flags.
  ExperimentConfig cfg;
  cfg.clips = 10;
  cfg.seed = 1;
  int compared = 0, differing = 0;
  for (int id = 0; id < cfg.clips; ++id) {
    const ClipInputs in = PrepareClip(cfg, id);
    for (bool correction : {true, false}) {
      const SessionTimeline tl = RunSyncSession(in.delivered.haptic, in.delivered.frames,
                                                MakeSessionConfig(cfg, correction, in.seed));
      ++compared;
      differing += !BitIdentical(tl.haptic_played, in.delivered.haptic);
    }
  }
  return {g_runs_differing == 0 && differing == 0 && g_runs_checked > 0,
          std::to_string(g_runs_checked) + " clip runs flagged identical, " +
              std::to_string(compared - differing) + "/" + std::to_string(compared) +
              " sessions bit-identical on direct comparison"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"delay estimation accuracy", DelayEstimation},
      {"sync probability gap", SyncProbabilityGap},
      {"collision oracle equivalence", CollisionOracle},
      {"threshold classification", ThresholdClassification},
      {"filter properties", FilterProperties},
      {"adjustment optimality", AdjustmentOptimality},
      {"statistics", Statistics},
      {"determinism and codec", DeterminismAndCodec},
      {"haptic stream invariance", HapticInvariance},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
