#ifndef HAPTISYNC_SCENE_H_
#define HAPTISYNC_SCENE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "haptisync/haptic.h"
#include "haptisync/vision.h"

namespace haptisync {

inline constexpr double kDefaultFrameRateHz = 30.0;

// Ball top-left corner at time t.
struct Waypoint {
  double t = 0.0;  // seconds
  double x = 0.0;
  double y = 0.0;
};

// A ball moving along a piecewise-linear path next to a static box. The
// ball holds its first waypoint before the path starts and its last one after
// it ends.
struct SceneScript {
  double duration_s = 30.0;
  std::vector<Waypoint> ball_path;
  double ball_w = 60.0;
  double ball_h = 60.0;
  std::string ball_label = "ball";
  BoundingBox box_rect{900.0, 440.0, 200.0, 200.0, "box"};
  double contact_stiffness = 0.1;  // force units per pixel of penetration
  double baseline_force = 0.0;
  double force_noise_sd = 0.0;     // Gaussian noise added to every axis
  int frame_width = kDefaultFrameWidth;
  int frame_height = kDefaultFrameHeight;

  // Throws ConfigError on bad scalars and on waypoints that put the ball
  // outside the frame.
  void Validate() const;
};

struct SceneStreams {
  HapticTrace haptic;
  std::vector<VideoFrame> frames;
};

// Samples the script at both rates; sample i sits at i / rate exactly. The
// force has magnitude baseline + stiffness * depth, where depth is the
// overlap along the axis of least penetration (0 when apart). It points from
// the box towards the ball along that axis during contact and along +x
// otherwise. Noise, if any, is added per axis.
SceneStreams GenerateScene(const SceneScript& script,
                           double haptic_rate_hz = kDefaultHapticRateHz,
                           double frame_rate_hz = kDefaultFrameRateHz,
                           uint64_t rng_seed = 0);

// Ball position at time t (top-left corner).
Waypoint BallPositionAt(const SceneScript& script, double t);

// Parameters for a script of repeated short taps of the ball on the left face
// of the box. Contacts start on frame boundaries so that the first
// overlapping frame shows the very first instant of contact.
struct TapSceneParams {
  double duration_s = 30.0;
  double frame_rate_hz = kDefaultFrameRateHz;
  int gap_min_frames = 12;       // spacing between contact starts
  int gap_max_frames = 20;
  int contact_frames = 4;
  int approach_frames = 2;       // travel time from rest to touch
  double rest_gap_px = 60.0;     // ball-box distance at rest
  double press_depth_px = 18.0;
  double press_s = 0.02;         // time to reach full depth
  double contact_stiffness = 0.1;
  double baseline_force = 0.0;
  double force_noise_sd = 0.0;

  void Validate() const;
};

SceneScript MakeTapScene(const TapSceneParams& params, uint64_t rng_seed);

// Indices of frames where the ball starts touching the box.
std::vector<int64_t> ContactOnsetFrames(const SceneScript& script,
                                        double frame_rate_hz);

}  // namespace haptisync

#endif  // HAPTISYNC_SCENE_H_
