#include "haptisync/scene.h"

#include <algorithm>
#include <cmath>

#include "haptisync/error.h"
#include "haptisync/rng.h"

namespace haptisync {

namespace {

int64_t SampleCount(double duration_s, double rate_hz) {
  return static_cast<int64_t>(std::floor(duration_s * rate_hz + 1e-9));
}

BoundingBox BallBox(const SceneScript& s, double t) {
  const Waypoint p = BallPositionAt(s, t);
  return BoundingBox{p.x, p.y, s.ball_w, s.ball_h, s.ball_label};
}

void ContactForce(const SceneScript& s, const BoundingBox& ball, double f[3]) {
  const BoundingBox& box = s.box_rect;
  double magnitude = s.baseline_force;
  int axis = 0;
  double sign = 1.0;
  if (RectsCollide(ball, box)) {
    const double ox = std::min(ball.x + ball.w, box.x + box.w) - std::max(ball.x, box.x);
    const double oy = std::min(ball.y + ball.h, box.y + box.h) - std::max(ball.y, box.y);
    double rel;
    if (ox <= oy) {
      magnitude += s.contact_stiffness * ox;
      rel = (ball.x + ball.w / 2) - (box.x + box.w / 2);
    } else {
      axis = 1;
      magnitude += s.contact_stiffness * oy;
      rel = (ball.y + ball.h / 2) - (box.y + box.h / 2);
    }
    sign = rel < 0.0 ? -1.0 : 1.0;
  }
  f[0] = f[1] = f[2] = 0.0;
  f[axis] = sign * magnitude;
}

}  // namespace

void SceneScript::Validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("scene duration must be positive");
  }
  if (!(contact_stiffness > 0.0)) throw ConfigError("contact_stiffness must be positive");
  if (!(baseline_force >= 0.0)) throw ConfigError("baseline_force must be non-negative");
  if (!(force_noise_sd >= 0.0)) throw ConfigError("force_noise_sd must be non-negative");
  if (frame_width <= 0 || frame_height <= 0) throw ConfigError("frame size must be positive");
  if (!(ball_w > 0.0 && ball_h > 0.0)) throw ConfigError("ball size must be positive");
  if (ball_label.empty() || box_rect.label.empty()) throw ConfigError("labels must not be empty");
  if (ball_label == box_rect.label) throw ConfigError("ball and box need distinct labels");
  if (!box_rect.Valid() || box_rect.x < 0 || box_rect.y < 0 ||
      box_rect.x + box_rect.w > frame_width || box_rect.y + box_rect.h > frame_height) {
    throw ConfigError("box lies outside the frame");
  }
  if (ball_path.empty()) throw ConfigError("ball path needs at least one waypoint");
  for (size_t i = 0; i < ball_path.size(); ++i) {
    const Waypoint& w = ball_path[i];
    if (!std::isfinite(w.t) || !std::isfinite(w.x) || !std::isfinite(w.y)) {
      throw ConfigError("waypoint " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && w.t < ball_path[i - 1].t) {
      throw ConfigError("waypoints must be sorted by time");
    }
    if (w.x < 0 || w.y < 0 || w.x + ball_w > frame_width || w.y + ball_h > frame_height) {
      throw ConfigError("waypoint " + std::to_string(i) + " puts the ball outside the frame");
    }
  }
}

Waypoint BallPositionAt(const SceneScript& script, double t) {
  const std::vector<Waypoint>& p = script.ball_path;
  if (p.empty()) throw ConfigError("ball path needs at least one waypoint");
  if (t <= p.front().t) return {t, p.front().x, p.front().y};
  if (t >= p.back().t) return {t, p.back().x, p.back().y};
  // First waypoint strictly after t.
  const auto hi = std::upper_bound(
      p.begin(), p.end(), t, [](double v, const Waypoint& w) { return v < w.t; });
  const Waypoint& b = *hi;
  const Waypoint& a = *(hi - 1);
  if (t == a.t || b.t == a.t) return {t, a.x, a.y};
  const double u = (t - a.t) / (b.t - a.t);
  return {t, a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u};
}

SceneStreams GenerateScene(const SceneScript& script, double haptic_rate_hz,
                           double frame_rate_hz, uint64_t rng_seed) {
  script.Validate();
  if (!(haptic_rate_hz > 0.0) || !(frame_rate_hz > 0.0)) {
    throw ConfigError("rates must be positive");
  }
  SceneStreams out;
  Rng rng(rng_seed);
  const int64_t n_h = SampleCount(script.duration_s, haptic_rate_hz);
  out.haptic.rate_hz = haptic_rate_hz;
  out.haptic.samples.resize(n_h);
  for (int64_t i = 0; i < n_h; ++i) {
    const double t = double(i) / haptic_rate_hz;
    double f[3];
    ContactForce(script, BallBox(script, t), f);
    if (script.force_noise_sd > 0.0) {
      for (double& v : f) v += rng.Normal(0.0, script.force_noise_sd);
    }
    out.haptic.samples[i] = HapticSample{t, f[0], f[1], f[2]};
  }
  const int64_t n_f = SampleCount(script.duration_s, frame_rate_hz);
  out.frames.resize(n_f);
  for (int64_t j = 0; j < n_f; ++j) {
    VideoFrame& fr = out.frames[j];
    fr.index = j;
    fr.t = double(j) / frame_rate_hz;
    fr.width = script.frame_width;
    fr.height = script.frame_height;
    fr.objects = {BallBox(script, fr.t), script.box_rect};
  }
  return out;
}

void TapSceneParams::Validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("scene duration must be positive");
  if (!(frame_rate_hz > 0.0)) throw ConfigError("frame rate must be positive");
  if (contact_frames < 1 || approach_frames < 1) {
    throw ConfigError("contact and approach must last at least one frame");
  }
  if (gap_min_frames < contact_frames + 2 * approach_frames + 1 ||
      gap_max_frames < gap_min_frames) {
    throw ConfigError("tap gaps too short for contact plus approach");
  }
  if (!(rest_gap_px > 0.0) || !(press_depth_px > 0.0)) {
    throw ConfigError("rest gap and press depth must be positive");
  }
  if (!(press_s > 0.0) || 2.0 * press_s >= contact_frames / frame_rate_hz) {
    throw ConfigError("press time must be shorter than half the contact");
  }
  if (!(contact_stiffness > 0.0)) throw ConfigError("contact_stiffness must be positive");
  if (!(baseline_force >= 0.0)) throw ConfigError("baseline_force must be non-negative");
  if (!(force_noise_sd >= 0.0)) throw ConfigError("force_noise_sd must be non-negative");
}

SceneScript MakeTapScene(const TapSceneParams& params, uint64_t rng_seed) {
  params.Validate();
  SceneScript s;
  s.duration_s = params.duration_s;
  s.contact_stiffness = params.contact_stiffness;
  s.baseline_force = params.baseline_force;
  s.force_noise_sd = params.force_noise_sd;
  const double y = s.box_rect.y + (s.box_rect.h - s.ball_h) / 2.0;
  const double touch = s.box_rect.x - s.ball_w;
  const double rest = touch - params.rest_gap_px;
  const double pressed = touch + params.press_depth_px;
  if (rest < 0.0) throw ConfigError("rest gap pushes the ball out of the frame");

  const double fr = params.frame_rate_hz;
  const int64_t total = SampleCount(params.duration_s, fr);
  s.ball_path.push_back({0.0, rest, y});
  Rng rng(rng_seed);
  int64_t c = rng.UniformInt(params.gap_min_frames, params.gap_max_frames);
  while (c + params.contact_frames + params.approach_frames < total) {
    const double tc = double(c) / fr;
    const double t_release = double(c + params.contact_frames) / fr;
    s.ball_path.push_back({double(c - params.approach_frames) / fr, rest, y});
    s.ball_path.push_back({tc, touch, y});
    s.ball_path.push_back({tc + params.press_s, pressed, y});
    s.ball_path.push_back({t_release - params.press_s, pressed, y});
    s.ball_path.push_back({t_release, touch, y});
    s.ball_path.push_back(
        {double(c + params.contact_frames + params.approach_frames) / fr, rest, y});
    c += rng.UniformInt(params.gap_min_frames, params.gap_max_frames);
  }
  return s;
}

std::vector<int64_t> ContactOnsetFrames(const SceneScript& script,
                                        double frame_rate_hz) {
  std::vector<int64_t> out;
  const int64_t n = SampleCount(script.duration_s, frame_rate_hz);
  bool prev = false;
  for (int64_t j = 0; j < n; ++j) {
    const bool now = RectsCollide(BallBox(script, double(j) / frame_rate_hz),
                                  script.box_rect);
    if (now && !prev) out.push_back(j);
    prev = now;
  }
  return out;
}

}  // namespace haptisync
