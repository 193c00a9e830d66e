#include "haptisync/vision.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "haptisync/error.h"
#include "haptisync/rng.h"

namespace haptisync {

bool BoundingBox::Valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

void VisionDetectorConfig::Validate() const {
  if (hand_label.empty()) throw ConfigError("hand_label must not be empty");
  if (!(jitter_px >= 0.0) || !std::isfinite(jitter_px)) {
    throw ConfigError("jitter_px must be non-negative");
  }
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) {
    throw ConfigError("drop_prob must lie in [0, 1]");
  }
}

bool RectsCollide(const BoundingBox& a, const BoundingBox& b) {
  return !(a.x + a.w < b.x || b.x + b.w < a.x || a.y + a.h < b.y ||
           b.y + b.h < a.y);
}

bool ClampToFrame(BoundingBox& box, int width, int height) {
  const double x0 = std::clamp(box.x, 0.0, double(width));
  const double y0 = std::clamp(box.y, 0.0, double(height));
  const double x1 = std::clamp(box.x + box.w, 0.0, double(width));
  const double y1 = std::clamp(box.y + box.h, 0.0, double(height));
  box.x = x0;
  box.y = y0;
  box.w = x1 - x0;
  box.h = y1 - y0;
  return box.w > 0.0 && box.h > 0.0;
}

std::vector<KeyEvent> DetectKeyFrames(std::span<const VideoFrame> frames,
                                      const VisionDetectorConfig& cfg) {
  cfg.Validate();
  std::vector<KeyEvent> events;
  // Labels the hand touched in the previous frame.
  std::map<std::string, bool> prev;
  int64_t prev_index = -1;
  for (const VideoFrame& f : frames) {
    if (f.index < 0) throw InputError("negative frame index");
    if (f.index <= prev_index) {
      throw InputError("frames must be sorted by strictly increasing index");
    }
    prev_index = f.index;

    const BoundingBox* hand = nullptr;
    for (const BoundingBox& b : f.objects) {
      if (b.label != cfg.hand_label) continue;
      if (hand != nullptr) {
        throw InputError("frame " + std::to_string(f.index) +
                         " has more than one hand box");
      }
      hand = &b;
    }
    std::map<std::string, bool> now;
    if (hand != nullptr) {
      for (const BoundingBox& b : f.objects) {
        if (&b == hand || !RectsCollide(*hand, b)) continue;
        now[b.label] = true;
      }
    }
    for (const auto& [label, touching] : now) {
      if (touching && !prev.contains(label)) {
        events.push_back(KeyEvent{EventKind::kVisual, f.t, f.index, label});
      }
    }
    prev = std::move(now);
  }
  return events;
}

std::vector<BoundingBox> SyntheticDetect(std::span<const BoundingBox> true_boxes,
                                         const VisionDetectorConfig& cfg,
                                         uint64_t rng_seed) {
  cfg.Validate();
  Rng rng(rng_seed);
  std::vector<BoundingBox> out;
  out.reserve(true_boxes.size());
  for (const BoundingBox& b : true_boxes) {
    // Every box consumes five draws, dropped or not.
    const bool drop = rng.Uniform01() < cfg.drop_prob;
    BoundingBox d = b;
    d.x += rng.Uniform(-cfg.jitter_px, cfg.jitter_px);
    d.y += rng.Uniform(-cfg.jitter_px, cfg.jitter_px);
    d.w = std::max(1.0, d.w + rng.Uniform(-cfg.jitter_px, cfg.jitter_px));
    d.h = std::max(1.0, d.h + rng.Uniform(-cfg.jitter_px, cfg.jitter_px));
    if (cfg.jitter_px == 0.0) d = b;
    if (!drop) out.push_back(std::move(d));
  }
  return out;
}

SyntheticDetector::SyntheticDetector(VisionDetectorConfig cfg, uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed) {
  cfg_.Validate();
}

std::vector<BoundingBox> SyntheticDetector::Detect(const VideoFrame& frame) {
  std::vector<BoundingBox> boxes = SyntheticDetect(
      frame.objects, cfg_, DeriveSeed(seed_, static_cast<uint64_t>(frame.index)));
  std::vector<BoundingBox> kept;
  for (BoundingBox& b : boxes) {
    if (ClampToFrame(b, frame.width, frame.height)) kept.push_back(std::move(b));
  }
  return kept;
}

}  // namespace haptisync
