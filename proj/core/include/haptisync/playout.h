#ifndef HAPTISYNC_PLAYOUT_H_
#define HAPTISYNC_PLAYOUT_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

#include "haptisync/sync.h"
#include "haptisync/vision.h"

namespace haptisync {

inline constexpr size_t kDefaultBufferCapacity = 60;

enum class PlayoutMode { kSteady, kAdvancing, kRepeating };

enum class PlayoutActionKind { kEmitNext, kEmitSkip, kEmitRepeat };

struct PlayoutAction {
  PlayoutActionKind kind = PlayoutActionKind::kEmitNext;
  VideoFrame frame;
  // Buffer entries removed by this step (0 for repeats, 2 for skips).
  int consumed = 0;
  // Set when a repeat was forced by an empty buffer.
  bool underrun = false;
};

// Receiver-side playout buffer for the visual (auxiliary) stream. One Step()
// per frame clock tick. While a correction is active every tick moves the
// residual delay by one frame interval: advancing skips one frame, repeating
// re-emits the previous one. The controller returns to steady once the
// residual is inside the thresholds and a further tick would not bring it
// closer to zero.
//
// Single writer: one thread owns a controller.
class PlayoutController {
 public:
  explicit PlayoutController(SyncThresholds thresholds = {},
                             double frame_interval_ms = kDefaultFrameIntervalMs,
                             size_t capacity = kDefaultBufferCapacity);

  // Appends a received frame. When the buffer is full the oldest entry is
  // dropped and returned.
  std::optional<VideoFrame> Push(VideoFrame frame);

  // Starts (or replaces) a correction for a fresh delay estimate. An
  // in-sync estimate cancels any correction in progress.
  void Retarget(DelayEstimate estimate);

  // Forces a mode and residual; mostly useful for tests and replay.
  void SetState(PlayoutMode mode, double residual_delay_ms);

  // Throws StartupError when no frame has ever been pushed.
  PlayoutAction Step(int64_t tick);

  PlayoutMode mode() const { return mode_; }
  double residual_delay_ms() const { return residual_delay_ms_; }
  double frame_interval_ms() const { return frame_interval_ms_; }
  size_t size() const { return buffer_.size(); }
  size_t capacity() const { return capacity_; }
  const std::deque<VideoFrame>& buffer() const { return buffer_; }
  const std::optional<VideoFrame>& last_emitted() const { return last_; }

  int64_t consumed() const { return consumed_; }
  int64_t emitted() const { return emitted_; }
  int64_t advance_ticks() const { return advance_ticks_; }
  int64_t repeat_ticks() const { return repeat_ticks_; }
  int64_t overflow_drops() const { return overflow_drops_; }

 private:
  PlayoutAction EmitNext();
  PlayoutAction EmitRepeat(bool underrun);
  void MaybeSettle();

  SyncThresholds thresholds_;
  double frame_interval_ms_;
  size_t capacity_;
  std::deque<VideoFrame> buffer_;
  std::optional<VideoFrame> last_;
  bool ever_buffered_ = false;
  PlayoutMode mode_ = PlayoutMode::kSteady;
  double residual_delay_ms_ = 0.0;
  int64_t last_tick_ = -1;

  int64_t consumed_ = 0;
  int64_t emitted_ = 0;
  int64_t advance_ticks_ = 0;
  int64_t repeat_ticks_ = 0;
  int64_t overflow_drops_ = 0;
};

inline PlayoutAction StepPlayout(PlayoutController& ctrl, int64_t tick) {
  return ctrl.Step(tick);
}

const char* ToString(PlayoutMode mode);
const char* ToString(PlayoutActionKind kind);

}  // namespace haptisync

#endif  // HAPTISYNC_PLAYOUT_H_
