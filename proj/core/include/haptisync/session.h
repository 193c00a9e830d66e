#ifndef HAPTISYNC_SESSION_H_
#define HAPTISYNC_SESSION_H_

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "haptisync/haptic.h"
#include "haptisync/playout.h"
#include "haptisync/sync.h"
#include "haptisync/vision.h"

namespace haptisync {

struct SessionConfig {
  HapticDetectorConfig haptic;
  VisionDetectorConfig vision;
  SyncThresholds thresholds;
  double frame_interval_ms = kDefaultFrameIntervalMs;
  double window_s = 1.0;
  // Playback runs this many frame ticks behind reception. The same lookahead
  // applies to both streams, so it adds latency without changing the offset.
  int lookahead_frames = 15;
  size_t buffer_capacity = kDefaultBufferCapacity;
  PairingStrategy pairing = PairingStrategy::kNearest;
  bool correction = true;
  // Seed for the synthetic object detector (only used when the vision config
  // has jitter or drops).
  uint64_t detector_seed = 0;

  void Validate() const;
};

struct TimelinePair {
  EventPair pair;
  int64_t tick = 0;         // playback tick at which the pair was committed
  double delay_ms = 0.0;    // estimate, T_v - T_h
  double truth_ms = 0.0;    // actual visual offset of the paired key frame
  SyncStatus status = SyncStatus::kInSync;
  Adjustment plan;
};

struct TimelineAdjustment {
  int64_t tick = 0;
  PlayoutActionKind action = PlayoutActionKind::kEmitSkip;
  bool underrun = false;
};

struct TickRecord {
  int64_t tick = 0;
  // Emitted frame index, or -1 while nothing has been received yet.
  int64_t frame_index = -1;
  double offset_ms = 0.0;
  PlayoutActionKind action = PlayoutActionKind::kEmitNext;
  bool in_sync = false;
};

struct SessionTimeline {
  std::vector<TimelinePair> pairs;
  std::vector<KeyEvent> failures;  // haptic key events without a visual match
  std::vector<TimelineAdjustment> adjustments;
  std::vector<TickRecord> ticks;
  HapticTrace haptic_played;
  int64_t blank_ticks = 0;
  double sync_fraction = 0.0;  // over non-blank ticks
  double mae_ms = 0.0;         // |estimate - truth| over pairs, 0 if none

  int64_t consumed = 0;
  int64_t emitted = 0;
  int64_t advance_ticks = 0;
  int64_t repeat_ticks = 0;
  int64_t overflow_drops = 0;

  // Offsets of the non-blank ticks, in tick order.
  std::vector<double> Offsets() const;
  std::vector<int64_t> EmittedFrameIndices() const;
  nlohmann::json ToJson() const;
};

// Runs the receiver loop over one clip. Haptic samples play at their own
// timestamps; visual frames enter the playout buffer in arrival order and the
// newest arrived frame is what a live receiver would show. Haptic key events
// are detected as samples arrive, matched against visual key frames in the
// buffer and already played, and every committed pair re-targets the
// controller when correction is enabled.
SessionTimeline RunSyncSession(const HapticTrace& haptic,
                               std::span<const ReceivedFrame> frames,
                               const SessionConfig& cfg);

}  // namespace haptisync

#endif  // HAPTISYNC_SESSION_H_
