#ifndef HAPTISYNC_SCHEDULE_H_
#define HAPTISYNC_SCHEDULE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "haptisync/sync.h"
#include "haptisync/vision.h"

namespace haptisync {

inline constexpr int kMaxDelayFrames = 10;

// Visual delay of d_n frames held for t_n frames. Positive d_n makes the
// visual stream arrive late.
struct DelayScheduleEntry {
  int d_n = 0;
  int t_n = 1;

  bool operator==(const DelayScheduleEntry&) const = default;
};

struct DelaySchedule {
  std::vector<DelayScheduleEntry> entries;
  double frame_interval_ms = kDefaultFrameIntervalMs;

  void Validate() const;
  int64_t TotalFrames() const;
  // Delay governing frame `index`; throws InputError past the end.
  int DelayForFrame(int64_t index) const;

  bool operator==(const DelaySchedule&) const = default;
};

struct RandomScheduleOptions {
  int d_min = -kMaxDelayFrames;
  int d_max = kMaxDelayFrames;
  int t_min = 1;
  int t_max = 100;
};

// Concatenates uniformly drawn entries until clip_frames is covered; the last
// entry is truncated so TotalFrames() == clip_frames.
DelaySchedule RandomSchedule(uint64_t rng_seed, int64_t clip_frames,
                             const RandomScheduleOptions& opts = {});

DelaySchedule ConstantSchedule(int d_n, int64_t clip_frames);

// The 16-entry example schedule used in the evaluation (900 frames).
DelaySchedule ExampleSchedule();

// Shifts each frame's arrival by its entry's delay and returns the frames
// sorted by arrival time (ties by index). Frames must be sorted by index and
// fully covered by the schedule.
std::vector<ReceivedFrame> ApplyDelaySchedule(std::span<const VideoFrame> frames,
                                              const DelaySchedule& sched);

}  // namespace haptisync

#endif  // HAPTISYNC_SCHEDULE_H_
