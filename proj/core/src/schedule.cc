#include "haptisync/schedule.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "haptisync/error.h"
#include "haptisync/rng.h"

namespace haptisync {

void DelaySchedule::Validate() const {
  if (!(frame_interval_ms > 0.0)) throw ConfigError("frame interval must be positive");
  for (size_t i = 0; i < entries.size(); ++i) {
    if (std::abs(entries[i].d_n) > kMaxDelayFrames) {
      throw ConfigError("schedule entry " + std::to_string(i) +
                        ": |d_n| must be at most " + std::to_string(kMaxDelayFrames));
    }
    if (entries[i].t_n < 1) {
      throw ConfigError("schedule entry " + std::to_string(i) + ": t_n must be >= 1");
    }
  }
}

int64_t DelaySchedule::TotalFrames() const {
  int64_t total = 0;
  for (const DelayScheduleEntry& e : entries) total += e.t_n;
  return total;
}

int DelaySchedule::DelayForFrame(int64_t index) const {
  if (index < 0) throw InputError("negative frame index");
  int64_t end = 0;
  for (const DelayScheduleEntry& e : entries) {
    end += e.t_n;
    if (index < end) return e.d_n;
  }
  throw InputError("frame " + std::to_string(index) +
                   " lies past the end of the delay schedule");
}

DelaySchedule RandomSchedule(uint64_t rng_seed, int64_t clip_frames,
                             const RandomScheduleOptions& opts) {
  if (clip_frames <= 0) throw ConfigError("clip_frames must be positive");
  if (opts.d_min > opts.d_max || std::abs(opts.d_min) > kMaxDelayFrames ||
      std::abs(opts.d_max) > kMaxDelayFrames) {
    throw ConfigError("delay range must lie within +/-" + std::to_string(kMaxDelayFrames));
  }
  if (opts.t_min < 1 || opts.t_max < opts.t_min) {
    throw ConfigError("duration range must satisfy 1 <= t_min <= t_max");
  }
  Rng rng(rng_seed);
  DelaySchedule s;
  int64_t covered = 0;
  while (covered < clip_frames) {
    DelayScheduleEntry e;
    e.d_n = static_cast<int>(rng.UniformInt(opts.d_min, opts.d_max));
    e.t_n = static_cast<int>(rng.UniformInt(opts.t_min, opts.t_max));
    if (covered + e.t_n > clip_frames) e.t_n = static_cast<int>(clip_frames - covered);
    covered += e.t_n;
    s.entries.push_back(e);
  }
  return s;
}

DelaySchedule ConstantSchedule(int d_n, int64_t clip_frames) {
  if (clip_frames <= 0) throw ConfigError("clip_frames must be positive");
  DelaySchedule s;
  s.entries.push_back({d_n, static_cast<int>(clip_frames)});
  s.Validate();
  return s;
}

DelaySchedule ExampleSchedule() {
  DelaySchedule s;
  s.entries = {{7, 19},  {-7, 18}, {8, 95},  {-8, 17}, {8, 56},  {9, 65},
               {-1, 82}, {0, 46},  {5, 69},  {-8, 96}, {-8, 47}, {2, 86},
               {0, 36},  {1, 99},  {-1, 14}, {-7, 55}};
  return s;
}

std::vector<ReceivedFrame> ApplyDelaySchedule(std::span<const VideoFrame> frames,
                                              const DelaySchedule& sched) {
  sched.Validate();
  std::vector<ReceivedFrame> out;
  out.reserve(frames.size());
  int64_t prev = -1;
  for (const VideoFrame& f : frames) {
    if (f.index <= prev) throw InputError("frames must be sorted by index");
    prev = f.index;
    const double shift = sched.DelayForFrame(f.index) * sched.frame_interval_ms;
    out.push_back(ReceivedFrame{f, f.t * 1000.0 + shift});
  }
  // Arrivals equal up to rounding count as ties and keep index order.
  auto key = [](const ReceivedFrame& r) { return std::llround(r.arrival_ms * 1e6); };
  std::stable_sort(out.begin(), out.end(),
                   [&](const ReceivedFrame& a, const ReceivedFrame& b) {
                     return key(a) < key(b);
                   });
  return out;
}

}  // namespace haptisync
