#include "haptisync/playout.h"

#include <cmath>

#include "haptisync/error.h"

namespace haptisync {

PlayoutController::PlayoutController(SyncThresholds thresholds,
                                     double frame_interval_ms, size_t capacity)
    : thresholds_(thresholds),
      frame_interval_ms_(frame_interval_ms),
      capacity_(capacity) {
  thresholds_.Validate();
  if (!(frame_interval_ms_ > 0.0) || !std::isfinite(frame_interval_ms_)) {
    throw ConfigError("frame interval must be positive");
  }
  if (capacity_ < 2) throw ConfigError("buffer capacity must be at least 2");
}

std::optional<VideoFrame> PlayoutController::Push(VideoFrame frame) {
  if (!buffer_.empty() && frame.index < buffer_.back().index) {
    throw InputError("frames must be pushed in index order");
  }
  std::optional<VideoFrame> dropped;
  if (buffer_.size() >= capacity_) {
    dropped = std::move(buffer_.front());
    buffer_.pop_front();
    ++overflow_drops_;
  }
  buffer_.push_back(std::move(frame));
  ever_buffered_ = true;
  return dropped;
}

void PlayoutController::Retarget(DelayEstimate estimate) {
  switch (CheckSync(estimate, thresholds_)) {
    case SyncStatus::kInSync:
      mode_ = PlayoutMode::kSteady;
      residual_delay_ms_ = 0.0;
      break;
    case SyncStatus::kVisualLags:
      mode_ = PlayoutMode::kAdvancing;
      residual_delay_ms_ = estimate.delay_ms;
      break;
    case SyncStatus::kVisualLeads:
      mode_ = PlayoutMode::kRepeating;
      residual_delay_ms_ = estimate.delay_ms;
      break;
  }
}

void PlayoutController::SetState(PlayoutMode mode, double residual_delay_ms) {
  mode_ = mode;
  residual_delay_ms_ = residual_delay_ms;
}

PlayoutAction PlayoutController::EmitNext() {
  PlayoutAction a;
  a.kind = PlayoutActionKind::kEmitNext;
  a.frame = std::move(buffer_.front());
  buffer_.pop_front();
  a.consumed = 1;
  last_ = a.frame;
  ++consumed_;
  ++emitted_;
  return a;
}

PlayoutAction PlayoutController::EmitRepeat(bool underrun) {
  if (!last_) throw StartupError("nothing to repeat before the first frame");
  PlayoutAction a;
  a.kind = PlayoutActionKind::kEmitRepeat;
  a.frame = *last_;
  a.consumed = 0;
  a.underrun = underrun;
  ++emitted_;
  ++repeat_ticks_;
  return a;
}

void PlayoutController::MaybeSettle() {
  if (mode_ == PlayoutMode::kSteady) return;
  // Stop once inside the window and one more frame would not get closer to 0.
  if (thresholds_.Inside(residual_delay_ms_) &&
      std::abs(residual_delay_ms_) <= frame_interval_ms_ / 2.0 + 1e-9) {
    mode_ = PlayoutMode::kSteady;
  }
}

PlayoutAction PlayoutController::Step(int64_t tick) {
  if (!ever_buffered_) {
    throw StartupError("playout stepped before any frame was buffered");
  }
  last_tick_ = tick;
  PlayoutAction a;
  if (buffer_.empty()) {
    a = EmitRepeat(/*underrun=*/true);
    residual_delay_ms_ += mode_ == PlayoutMode::kSteady ? 0.0 : frame_interval_ms_;
  } else if (mode_ == PlayoutMode::kAdvancing && buffer_.size() >= 2) {
    buffer_.pop_front();
    ++consumed_;
    a = EmitNext();
    a.kind = PlayoutActionKind::kEmitSkip;
    a.consumed = 2;
    ++advance_ticks_;
    residual_delay_ms_ -= frame_interval_ms_;
  } else if (mode_ == PlayoutMode::kRepeating && last_) {
    a = EmitRepeat(/*underrun=*/false);
    residual_delay_ms_ += frame_interval_ms_;
  } else {
    a = EmitNext();
  }
  MaybeSettle();
  return a;
}

const char* ToString(PlayoutMode mode) {
  switch (mode) {
    case PlayoutMode::kSteady:
      return "steady";
    case PlayoutMode::kAdvancing:
      return "advancing";
    case PlayoutMode::kRepeating:
      return "repeating";
  }
  return "unknown";
}

const char* ToString(PlayoutActionKind kind) {
  switch (kind) {
    case PlayoutActionKind::kEmitNext:
      return "emit_next";
    case PlayoutActionKind::kEmitSkip:
      return "emit_skip";
    case PlayoutActionKind::kEmitRepeat:
      return "emit_repeat";
  }
  return "unknown";
}

}  // namespace haptisync
