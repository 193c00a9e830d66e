#ifndef HAPTISYNC_SYNC_H_
#define HAPTISYNC_SYNC_H_

#include <span>
#include <string>
#include <vector>

#include "haptisync/events.h"

namespace haptisync {

inline constexpr double kDefaultFrameIntervalMs = 1000.0 / 30.0;

struct EventPair {
  KeyEvent haptic;
  KeyEvent visual;

  // T_v - T_h in milliseconds; positive when the visual stream lags.
  double delay_ms() const { return (visual.t - haptic.t) * 1000.0; }
};

struct DelayEstimate {
  double delay_ms = 0.0;
};

// Open interval (d_alpha_ms, d_beta_ms) of imperceptible asynchrony.
struct SyncThresholds {
  double d_alpha_ms = -60.0;
  double d_beta_ms = 80.0;

  void Validate() const;
  bool Inside(double delay_ms) const {
    return d_alpha_ms < delay_ms && delay_ms < d_beta_ms;
  }
};

enum class SyncStatus { kInSync, kVisualLags, kVisualLeads };

SyncStatus CheckSync(DelayEstimate d, const SyncThresholds& th);

enum class AdjustDirection { kNone, kAdvance, kRepeat };

struct Adjustment {
  AdjustDirection direction = AdjustDirection::kNone;
  int ticks = 0;

  bool operator==(const Adjustment&) const = default;
};

// Smallest number of one-frame corrections that moves the delay strictly
// inside the thresholds: advance (skip) frames when the visual lags, repeat
// frames when it leads.
Adjustment PlanAdjustment(DelayEstimate d, const SyncThresholds& th,
                          double frame_interval_ms);

enum class PairingStrategy {
  kNearest,  // each haptic event takes the nearest unmatched visual event
  kInOrder,  // each haptic event takes the oldest unmatched visual event
};

struct PairingResult {
  std::vector<EventPair> pairs;
  std::vector<KeyEvent> unmatched_haptic;
};

// Greedy matching in haptic time order; candidates must lie within
// [t_h - window_s, t_h + window_s]. Unmatched haptic events are detection
// failures. Both inputs must be sorted by time.
PairingResult PairEvents(std::span<const KeyEvent> haptic_events,
                         std::span<const KeyEvent> visual_events,
                         double window_s = 1.0,
                         PairingStrategy strategy = PairingStrategy::kNearest);

const char* ToString(SyncStatus status);
const char* ToString(AdjustDirection direction);
const char* ToString(PairingStrategy strategy);
PairingStrategy ParsePairingStrategy(const std::string& name);

}  // namespace haptisync

#endif  // HAPTISYNC_SYNC_H_
