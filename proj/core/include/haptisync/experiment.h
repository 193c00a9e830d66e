#ifndef HAPTISYNC_EXPERIMENT_H_
#define HAPTISYNC_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "haptisync/haptic.h"
#include "haptisync/metrics.h"
#include "haptisync/scene.h"
#include "haptisync/schedule.h"
#include "haptisync/session.h"
#include "haptisync/sync.h"
#include "haptisync/transport.h"
#include "haptisync/vision.h"

namespace haptisync {

enum class ExperimentMode { kEstimateDelay, kSyncProbability, kEndToEnd, kStats };

const char* ToString(ExperimentMode mode);
ExperimentMode ParseExperimentMode(const std::string& name);

enum class ScheduleKind { kRandom, kConstant, kExample, kExplicit };

const char* ToString(ScheduleKind kind);
ScheduleKind ParseScheduleKind(const std::string& name);

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::kRandom;
  RandomScheduleOptions random;
  // kConstant: a fixed delay; when unset each clip draws one uniformly from
  // [random.d_min, random.d_max].
  bool has_constant = false;
  int constant_frames = 0;
  std::vector<DelayScheduleEntry> entries;  // kExplicit
};

struct RatesConfig {
  double haptic_hz = kDefaultHapticRateHz;
  double frame_hz = kDefaultFrameRateHz;
};

struct ReceiverConfig {
  int lookahead_frames = 15;
  size_t buffer_capacity = kDefaultBufferCapacity;
  double window_s = 1.0;
  PairingStrategy pairing = PairingStrategy::kNearest;
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kEndToEnd;
  TapSceneParams scene;
  RatesConfig rates;
  ScheduleConfig schedule;
  HapticDetectorConfig haptic_detector;
  VisionDetectorConfig vision_detector;
  SyncThresholds thresholds;
  TransportKind transport = TransportKind::kInProcess;
  ReceiverConfig receiver;
  uint64_t seed = 1;
  int clips = 10;
  bool correction = true;
  int threads = 0;  // 0: hardware concurrency
  std::string output_dir = "out";
  // Stats mode.
  std::string scores_path;
  double outlier_threshold = 0.7;
  int saturation_trials = 100;
  CorrelationKind saturation_kind = CorrelationKind::kPlcc;

  // Throws ConfigError.
  void Validate() const;
  // Unknown keys are rejected; missing keys keep their defaults.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

ExperimentConfig LoadExperimentConfig(const std::string& path);

SessionConfig MakeSessionConfig(const ExperimentConfig& cfg, bool correction,
                                uint64_t detector_seed);

struct ClipInputs {
  int clip_id = 0;
  uint64_t seed = 0;
  DelaySchedule schedule;
  SceneStreams scene;
  DeliveredStreams delivered;
  bool transport_fell_back = false;
};

// Scene, schedule and transport for one clip; seeds derive from cfg.seed and
// clip_id only.
ClipInputs PrepareClip(const ExperimentConfig& cfg, int clip_id);

struct ClipResult {
  int clip_id = 0;
  uint64_t seed = 0;
  DelaySchedule schedule;
  std::optional<SessionTimeline> on;  // absent when correction is disabled
  SessionTimeline off;
  bool haptic_identical = false;
  bool transport_fell_back = false;

  // Median pair delay of the uncorrected run, NaN if nothing was paired.
  double EstimatedDelayMs() const;
};

// Runs every clip without correction and, unless cfg.correction is false,
// with correction. Clips may run in parallel; results come back sorted by
// clip id.
std::vector<ClipResult> RunClips(const ExperimentConfig& cfg);

struct SessionReport {
  ExperimentConfig config;
  std::vector<ClipResult> clips;

  nlohmann::json ToJson() const;
  // Canonical serialization; identical inputs give identical bytes.
  std::string Dump() const;
  // Mean sync fraction over clips; NaN when the run is absent.
  double MeanSyncOn() const;
  double MeanSyncOff() const;
};

SessionReport RunSession(const ExperimentConfig& cfg);

}  // namespace haptisync

#endif  // HAPTISYNC_EXPERIMENT_H_
