#ifndef HAPTISYNC_EVENTS_H_
#define HAPTISYNC_EVENTS_H_

#include <cstdint>
#include <string>

namespace haptisync {

enum class EventKind { kHaptic, kVisual };

// A collision onset found in one of the two streams. `t` is receiver-local
// playback time in seconds; `source_index` is the haptic sample index or the
// video frame index. `label` names the axis ("x", "y", "z") for haptic events
// and the collided target label for visual ones.
struct KeyEvent {
  EventKind kind = EventKind::kHaptic;
  double t = 0.0;
  int64_t source_index = 0;
  std::string label;

  bool operator==(const KeyEvent&) const = default;
};

const char* ToString(EventKind kind);

}  // namespace haptisync

#endif  // HAPTISYNC_EVENTS_H_
