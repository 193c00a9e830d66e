#include "haptisync/sync.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "haptisync/error.h"

namespace haptisync {

void SyncThresholds::Validate() const {
  if (!(d_alpha_ms < 0.0 && 0.0 < d_beta_ms)) {
    throw ConfigError("thresholds must satisfy d_alpha < 0 < d_beta");
  }
}

SyncStatus CheckSync(DelayEstimate d, const SyncThresholds& th) {
  if (d.delay_ms >= th.d_beta_ms) return SyncStatus::kVisualLags;
  if (d.delay_ms <= th.d_alpha_ms) return SyncStatus::kVisualLeads;
  return SyncStatus::kInSync;
}

Adjustment PlanAdjustment(DelayEstimate d, const SyncThresholds& th,
                          double frame_interval_ms) {
  th.Validate();
  if (!(frame_interval_ms > 0.0) || !std::isfinite(frame_interval_ms)) {
    throw ConfigError("frame interval must be positive");
  }
  if (!std::isfinite(d.delay_ms)) throw InputError("delay must be finite");
  const SyncStatus status = CheckSync(d, th);
  if (status == SyncStatus::kInSync) return {};
  if (frame_interval_ms >= th.d_beta_ms - th.d_alpha_ms) {
    throw ConfigError("frame interval is wider than the sync window");
  }
  const bool lags = status == SyncStatus::kVisualLags;
  // Distance that must be removed before the delay crosses the near bound.
  const double excess = lags ? d.delay_ms - th.d_beta_ms
                             : th.d_alpha_ms - d.delay_ms;
  int n = std::max(1, static_cast<int>(std::floor(excess / frame_interval_ms)) + 1);
  auto corrected = [&](int k) {
    return lags ? d.delay_ms - k * frame_interval_ms
                : d.delay_ms + k * frame_interval_ms;
  };
  // Floating-point guard: settle on the exact smallest n.
  while (n > 1 && th.Inside(corrected(n - 1))) --n;
  while (!th.Inside(corrected(n))) ++n;
  return {lags ? AdjustDirection::kAdvance : AdjustDirection::kRepeat, n};
}

PairingResult PairEvents(std::span<const KeyEvent> haptic_events,
                         std::span<const KeyEvent> visual_events,
                         double window_s, PairingStrategy strategy) {
  if (!(window_s >= 0.0)) throw ConfigError("window must be non-negative");
  PairingResult out;
  std::vector<bool> used(visual_events.size(), false);
  for (const KeyEvent& h : haptic_events) {
    size_t best = visual_events.size();
    double best_score = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < visual_events.size(); ++i) {
      if (used[i]) continue;
      const double dt = visual_events[i].t - h.t;
      if (std::abs(dt) > window_s) continue;
      const double score =
          strategy == PairingStrategy::kNearest ? std::abs(dt) : visual_events[i].t;
      if (score < best_score) {
        best_score = score;
        best = i;
      }
    }
    if (best == visual_events.size()) {
      out.unmatched_haptic.push_back(h);
      continue;
    }
    used[best] = true;
    out.pairs.push_back(EventPair{h, visual_events[best]});
  }
  return out;
}

const char* ToString(SyncStatus status) {
  switch (status) {
    case SyncStatus::kInSync:
      return "in_sync";
    case SyncStatus::kVisualLags:
      return "visual_lags";
    case SyncStatus::kVisualLeads:
      return "visual_leads";
  }
  return "unknown";
}

const char* ToString(AdjustDirection direction) {
  switch (direction) {
    case AdjustDirection::kNone:
      return "none";
    case AdjustDirection::kAdvance:
      return "advance";
    case AdjustDirection::kRepeat:
      return "repeat";
  }
  return "unknown";
}

const char* ToString(PairingStrategy strategy) {
  return strategy == PairingStrategy::kNearest ? "nearest" : "in_order";
}

PairingStrategy ParsePairingStrategy(const std::string& name) {
  if (name == "nearest") return PairingStrategy::kNearest;
  if (name == "in_order") return PairingStrategy::kInOrder;
  throw ConfigError("unknown pairing strategy '" + name + "'");
}

}  // namespace haptisync
