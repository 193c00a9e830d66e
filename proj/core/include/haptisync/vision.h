#ifndef HAPTISYNC_VISION_H_
#define HAPTISYNC_VISION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "haptisync/events.h"

namespace haptisync {

inline constexpr int kDefaultFrameWidth = 1920;
inline constexpr int kDefaultFrameHeight = 1080;

// Axis-aligned rectangle; (x, y) is the top-left corner in pixels.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::string label;

  bool Valid() const;
  bool operator==(const BoundingBox&) const = default;
};

struct VideoFrame {
  int64_t index = 0;
  double t = 0.0;  // seconds
  std::vector<BoundingBox> objects;
  int width = kDefaultFrameWidth;
  int height = kDefaultFrameHeight;

  bool operator==(const VideoFrame&) const = default;
};

struct VisionDetectorConfig {
  std::string hand_label = "ball";
  double jitter_px = 0.0;
  double drop_prob = 0.0;

  void Validate() const;
};

// A video frame together with the receiver-clock time it arrived.
struct ReceivedFrame {
  VideoFrame frame;
  double arrival_ms = 0.0;

  bool operator==(const ReceivedFrame&) const = default;
};

// Closed-rectangle overlap test; boxes that share only an edge collide.
bool RectsCollide(const BoundingBox& a, const BoundingBox& b);

// Clips `box` to the frame; returns false when nothing is left inside.
bool ClampToFrame(BoundingBox& box, int width, int height);

// One visual key event per collision onset of the hand box with a target
// label. Frames must be sorted by index.
std::vector<KeyEvent> DetectKeyFrames(std::span<const VideoFrame> frames,
                                      const VisionDetectorConfig& cfg);

// Noisy copy of ground-truth boxes: every box is dropped with probability
// drop_prob, otherwise x, y, w, h each receive uniform noise in
// [-jitter_px, +jitter_px] (w, h clamped to >= 1).
std::vector<BoundingBox> SyntheticDetect(std::span<const BoundingBox> true_boxes,
                                         const VisionDetectorConfig& cfg,
                                         uint64_t rng_seed);

// Pluggable object detector. The library ships only SyntheticDetector.
class ObjectDetector {
 public:
  virtual ~ObjectDetector() = default;
  virtual std::vector<BoundingBox> Detect(const VideoFrame& frame) = 0;
};

// Treats the frame's boxes as ground truth and applies SyntheticDetect with a
// per-frame seed derived from `seed` and the frame index.
class SyntheticDetector : public ObjectDetector {
 public:
  SyntheticDetector(VisionDetectorConfig cfg, uint64_t seed);
  std::vector<BoundingBox> Detect(const VideoFrame& frame) override;

 private:
  VisionDetectorConfig cfg_;
  uint64_t seed_;
};

}  // namespace haptisync

#endif  // HAPTISYNC_VISION_H_
