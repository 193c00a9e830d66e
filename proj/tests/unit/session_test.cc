#include "haptisync/session.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "haptisync/error.h"
#include "haptisync/scene.h"
#include "haptisync/schedule.h"

namespace haptisync {
namespace {

constexpr double kT = 1000.0 / 30.0;

struct Clip {
  HapticTrace haptic;
  std::vector<ReceivedFrame> frames;
};

Clip MakeClip(uint64_t seed, const DelaySchedule& sched) {
  const SceneStreams s = GenerateScene(MakeTapScene({}, seed), 1000, 30, seed);
  return {s.haptic, ApplyDelaySchedule(s.frames, sched)};
}

SessionConfig Cfg(bool correction) {
  SessionConfig c;
  c.correction = correction;
  return c;
}

// Offset at tick k without correction: k minus the newest frame whose
// arrival slot (index + delay) is not after k.
double OracleOffSyncFraction(const std::vector<int>& delay_per_frame) {
  const int64_t n = int64_t(delay_per_frame.size());
  int64_t shown = 0, in_sync = 0;
  for (int64_t k = 0; k < n; ++k) {
    int64_t newest = -1;
    for (int64_t j = 0; j < n; ++j) {
      if (j + delay_per_frame[j] <= k) newest = j;
    }
    if (newest < 0) continue;
    ++shown;
    const double offset = double(k - newest) * kT;
    in_sync += -60.0 < offset && offset < 80.0;
  }
  return double(in_sync) / double(shown);
}

std::vector<int> PerFrame(const DelaySchedule& s) {
  std::vector<int> out;
  for (const auto& e : s.entries) out.insert(out.end(), e.t_n, e.d_n);
  return out;
}

TEST(SessionTest, ZeroDelayAllInSync) {
  const Clip clip = MakeClip(1, ConstantSchedule(0, 900));
  const SessionTimeline tl = RunSyncSession(clip.haptic, clip.frames, Cfg(true));
  ASSERT_GT(tl.pairs.size(), 40u);
  for (const TimelinePair& p : tl.pairs) {
    EXPECT_EQ(p.status, SyncStatus::kInSync);
    EXPECT_NEAR(p.delay_ms, 0.0, 2.0);
  }
  EXPECT_TRUE(tl.failures.empty());
  EXPECT_TRUE(tl.adjustments.empty());
  EXPECT_EQ(tl.sync_fraction, 1.0);
  EXPECT_EQ(tl.blank_ticks, 0);
  std::vector<int64_t> want(900);
  std::iota(want.begin(), want.end(), 0);
  EXPECT_EQ(tl.EmittedFrameIndices(), want);
  EXPECT_EQ(tl.haptic_played, clip.haptic);
}

TEST(SessionTest, ConstantSevenFrameDelay) {
  const Clip clip = MakeClip(2, ConstantSchedule(7, 900));
  const SessionTimeline on = RunSyncSession(clip.haptic, clip.frames, Cfg(true));
  const SessionTimeline off = RunSyncSession(clip.haptic, clip.frames, Cfg(false));
  ASSERT_FALSE(on.pairs.empty());
  EXPECT_NEAR(on.pairs.front().delay_ms, 7 * kT, 2.0);
  EXPECT_EQ(on.pairs.front().status, SyncStatus::kVisualLags);
  EXPECT_EQ(on.pairs.front().plan, (Adjustment{AdjustDirection::kAdvance, 5}));
  // After the first correction the residual stays in the window.
  const int64_t settle = on.pairs.front().tick + 10;
  for (const TickRecord& r : on.ticks) {
    if (r.tick > settle) EXPECT_TRUE(r.in_sync) << r.tick << " " << r.offset_ms;
  }
  for (const TickRecord& r : off.ticks) {
    if (r.frame_index >= 0) EXPECT_NEAR(r.offset_ms, 7 * kT, 1e-6);
  }
  EXPECT_EQ(off.sync_fraction, 0.0);
  EXPECT_GT(on.sync_fraction, 0.9);
  for (const TimelinePair& p : off.pairs) EXPECT_NEAR(p.delay_ms, 7 * kT, 2.0);
}

TEST(SessionTest, LeadingVisualIsRepeated) {
  const Clip clip = MakeClip(3, ConstantSchedule(-6, 900));
  const SessionTimeline on = RunSyncSession(clip.haptic, clip.frames, Cfg(true));
  ASSERT_FALSE(on.pairs.empty());
  EXPECT_NEAR(on.pairs.front().delay_ms, -6 * kT, 2.0);
  EXPECT_EQ(on.pairs.front().plan.direction, AdjustDirection::kRepeat);
  EXPECT_GT(on.repeat_ticks, 0);
  EXPECT_GT(on.sync_fraction, 0.9);
}

TEST(SessionTest, ExampleScheduleCorrectionBeatsReplay) {
  const DelaySchedule sched = ExampleSchedule();
  const Clip clip = MakeClip(4, sched);
  const SessionTimeline on = RunSyncSession(clip.haptic, clip.frames, Cfg(true));
  const SessionTimeline off = RunSyncSession(clip.haptic, clip.frames, Cfg(false));
  EXPECT_GT(on.sync_fraction, off.sync_fraction);
  EXPECT_NEAR(off.sync_fraction, OracleOffSyncFraction(PerFrame(sched)), 1e-12);
}

TEST(SessionProperty, OffRunMatchesTimelineOracle) {
  for (uint64_t seed = 10; seed < 16; ++seed) {
    const DelaySchedule sched = RandomSchedule(seed, 900);
    const Clip clip = MakeClip(seed, sched);
    const SessionTimeline off = RunSyncSession(clip.haptic, clip.frames, Cfg(false));
    EXPECT_NEAR(off.sync_fraction, OracleOffSyncFraction(PerFrame(sched)), 1e-12) << seed;
    EXPECT_TRUE(off.adjustments.empty() ||
                std::all_of(off.adjustments.begin(), off.adjustments.end(),
                            [](const TimelineAdjustment& a) { return a.underrun; }));
  }
}

TEST(SessionProperty, InvariantsUnderRandomSchedules) {
  for (uint64_t seed = 20; seed < 30; ++seed) {
    const Clip clip = MakeClip(seed, RandomSchedule(seed, 900));
    const SessionConfig cfg = Cfg(true);
    const SessionTimeline tl = RunSyncSession(clip.haptic, clip.frames, cfg);
    EXPECT_EQ(tl.haptic_played, clip.haptic);
    EXPECT_EQ(int64_t(tl.ticks.size()), 900);
    EXPECT_EQ(tl.emitted + tl.blank_ticks, 900);
    EXPECT_EQ(tl.advance_ticks + tl.repeat_ticks,
              std::count_if(tl.adjustments.begin(), tl.adjustments.end(),
                            [](const TimelineAdjustment& a) {
                              return a.action != PlayoutActionKind::kEmitNext;
                            }));
    int64_t skips = 0, in_sync = 0;
    for (const TickRecord& r : tl.ticks) {
      skips += r.action == PlayoutActionKind::kEmitSkip;
      if (r.frame_index >= 0) {
        EXPECT_EQ(r.in_sync, cfg.thresholds.Inside(r.offset_ms));
        in_sync += r.in_sync;
      }
    }
    EXPECT_EQ(skips, tl.advance_ticks);
    EXPECT_DOUBLE_EQ(tl.sync_fraction, double(in_sync) / double(900 - tl.blank_ticks));
    for (const TimelinePair& p : tl.pairs) {
      EXPECT_LE(std::abs(p.delay_ms), cfg.window_s * 1000.0 + 1e-9);
      EXPECT_EQ(p.pair.haptic.kind, EventKind::kHaptic);
      EXPECT_EQ(p.pair.visual.kind, EventKind::kVisual);
      EXPECT_EQ(p.status, CheckSync({p.delay_ms}, cfg.thresholds));
    }
    EXPECT_LT(tl.mae_ms, kT);
  }
}

TEST(SessionTest, InOrderPairingAtZeroDelay) {
  const Clip clip = MakeClip(5, ConstantSchedule(0, 900));
  SessionConfig cfg = Cfg(true);
  cfg.pairing = PairingStrategy::kInOrder;
  const SessionTimeline tl = RunSyncSession(clip.haptic, clip.frames, cfg);
  EXPECT_EQ(tl.sync_fraction, 1.0);
  EXPECT_TRUE(tl.failures.empty());
}

TEST(SessionTest, MissingVisualKeysAreFailures) {
  Clip clip = MakeClip(6, ConstantSchedule(0, 900));
  for (ReceivedFrame& f : clip.frames) f.frame.objects.resize(1);  // box never seen
  const SessionTimeline tl = RunSyncSession(clip.haptic, clip.frames, Cfg(true));
  EXPECT_TRUE(tl.pairs.empty());
  EXPECT_GT(tl.failures.size(), 40u);
  EXPECT_EQ(tl.sync_fraction, 1.0);
}

TEST(SessionTest, JsonShape) {
  const Clip clip = MakeClip(7, ConstantSchedule(3, 900));
  const nlohmann::json j = RunSyncSession(clip.haptic, clip.frames, Cfg(true)).ToJson();
  ASSERT_TRUE(j["pairs"].is_array());
  ASSERT_FALSE(j["pairs"].empty());
  for (const char* key : {"t_h_ms", "t_v_ms", "delay_ms", "status"}) {
    EXPECT_TRUE(j["pairs"][0].contains(key)) << key;
  }
  EXPECT_TRUE(j["adjustments"].is_array());
  EXPECT_TRUE(j["adjustments"][0].contains("tick"));
  EXPECT_TRUE(j["adjustments"][0].contains("action"));
  EXPECT_TRUE(j["summary"].contains("sync_fraction"));
  EXPECT_TRUE(j["summary"].contains("mae_ms"));
}

TEST(SessionTest, Errors) {
  EXPECT_THROW(RunSyncSession({}, {}, Cfg(true)), EmptyInputError);
  Clip clip = MakeClip(8, ConstantSchedule(0, 900));
  clip.frames.push_back(clip.frames.back());
  EXPECT_THROW(RunSyncSession(clip.haptic, clip.frames, Cfg(true)), InputError);
  SessionConfig bad = Cfg(true);
  bad.buffer_capacity = 10;
  EXPECT_THROW(RunSyncSession(clip.haptic, {}, bad), ConfigError);
}

}  // namespace
}  // namespace haptisync
