#include "haptisync/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include "haptisync/error.h"
#include "haptisync/rng.h"

namespace haptisync {

namespace {

using nlohmann::json;

void CheckKeys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string("'") + section + "' must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) {
      throw ConfigError(std::string("unknown key '") + k + "' in '" + section + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out, const char* section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + section + "." + key + "'");
  }
}

enum class Stream : uint64_t { kScene = 1, kSchedule, kDetector, kNoise };

uint64_t StreamSeed(uint64_t clip_seed, Stream s) {
  return DeriveSeed(clip_seed, static_cast<uint64_t>(s));
}

double Median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

const char* ToString(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kEstimateDelay:
      return "estimate-delay";
    case ExperimentMode::kSyncProbability:
      return "sync-probability";
    case ExperimentMode::kEndToEnd:
      return "end-to-end";
    case ExperimentMode::kStats:
      return "stats";
  }
  return "unknown";
}

ExperimentMode ParseExperimentMode(const std::string& name) {
  for (ExperimentMode m : {ExperimentMode::kEstimateDelay, ExperimentMode::kSyncProbability,
                           ExperimentMode::kEndToEnd, ExperimentMode::kStats}) {
    if (name == ToString(m)) return m;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

const char* ToString(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kRandom:
      return "random";
    case ScheduleKind::kConstant:
      return "constant";
    case ScheduleKind::kExample:
      return "example";
    case ScheduleKind::kExplicit:
      return "explicit";
  }
  return "unknown";
}

ScheduleKind ParseScheduleKind(const std::string& name) {
  for (ScheduleKind k : {ScheduleKind::kRandom, ScheduleKind::kConstant,
                         ScheduleKind::kExample, ScheduleKind::kExplicit}) {
    if (name == ToString(k)) return k;
  }
  throw ConfigError("unknown schedule kind '" + name + "'");
}

void ExperimentConfig::Validate() const {
  if (clips < 1) throw ConfigError("clips must be >= 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!(rates.haptic_hz > 0.0) || !(rates.frame_hz > 0.0)) {
    throw ConfigError("rates must be positive");
  }
  TapSceneParams scene_at_rate = scene;
  scene_at_rate.frame_rate_hz = rates.frame_hz;
  scene_at_rate.Validate();
  haptic_detector.Validate();
  vision_detector.Validate();
  thresholds.Validate();
  if (receiver.lookahead_frames < 0) throw ConfigError("lookahead must be >= 0");
  if (receiver.buffer_capacity < static_cast<size_t>(receiver.lookahead_frames) + 1) {
    throw ConfigError("buffer capacity must exceed the lookahead");
  }
  if (!(receiver.window_s > 0.0)) throw ConfigError("pairing window must be positive");
  DelaySchedule probe;
  probe.entries = schedule.entries;
  probe.Validate();
  if (schedule.kind == ScheduleKind::kExplicit && schedule.entries.empty()) {
    throw ConfigError("explicit schedule needs entries");
  }
  if (schedule.has_constant && std::abs(schedule.constant_frames) > kMaxDelayFrames) {
    throw ConfigError("constant delay out of range");
  }
  const RandomScheduleOptions& r = schedule.random;
  if (r.d_min > r.d_max || std::abs(r.d_min) > kMaxDelayFrames ||
      std::abs(r.d_max) > kMaxDelayFrames || r.t_min < 1 || r.t_max < r.t_min) {
    throw ConfigError("invalid random schedule ranges");
  }
  if (saturation_trials < 1) throw ConfigError("saturation trials must be >= 1");
  if (mode == ExperimentMode::kStats && scores_path.empty()) {
    throw ConfigError("stats mode needs a score file");
  }
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  ExperimentConfig c;
  CheckKeys(j, "config",
            {"mode", "scene", "rates", "schedule", "detector", "thresholds", "transport",
             "receiver", "seed", "clips", "correction", "threads", "output_dir", "stats"});
  std::string mode;
  Read(j, "mode", mode, "config");
  if (!mode.empty()) c.mode = ParseExperimentMode(mode);
  Read(j, "seed", c.seed, "config");
  Read(j, "clips", c.clips, "config");
  Read(j, "correction", c.correction, "config");
  Read(j, "threads", c.threads, "config");
  Read(j, "output_dir", c.output_dir, "config");

  if (j.contains("scene")) {
    const json& s = j["scene"];
    CheckKeys(s, "scene",
              {"duration_s", "gap_min_frames", "gap_max_frames", "contact_frames",
               "approach_frames", "rest_gap_px", "press_depth_px", "press_s",
               "contact_stiffness", "baseline_force", "force_noise_sd"});
    Read(s, "duration_s", c.scene.duration_s, "scene");
    Read(s, "gap_min_frames", c.scene.gap_min_frames, "scene");
    Read(s, "gap_max_frames", c.scene.gap_max_frames, "scene");
    Read(s, "contact_frames", c.scene.contact_frames, "scene");
    Read(s, "approach_frames", c.scene.approach_frames, "scene");
    Read(s, "rest_gap_px", c.scene.rest_gap_px, "scene");
    Read(s, "press_depth_px", c.scene.press_depth_px, "scene");
    Read(s, "press_s", c.scene.press_s, "scene");
    Read(s, "contact_stiffness", c.scene.contact_stiffness, "scene");
    Read(s, "baseline_force", c.scene.baseline_force, "scene");
    Read(s, "force_noise_sd", c.scene.force_noise_sd, "scene");
  }
  if (j.contains("rates")) {
    const json& r = j["rates"];
    CheckKeys(r, "rates", {"haptic_hz", "frame_hz"});
    Read(r, "haptic_hz", c.rates.haptic_hz, "rates");
    Read(r, "frame_hz", c.rates.frame_hz, "rates");
  }
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    CheckKeys(s, "schedule",
              {"kind", "d_min", "d_max", "t_min", "t_max", "constant_frames", "entries"});
    std::string kind;
    Read(s, "kind", kind, "schedule");
    if (!kind.empty()) c.schedule.kind = ParseScheduleKind(kind);
    Read(s, "d_min", c.schedule.random.d_min, "schedule");
    Read(s, "d_max", c.schedule.random.d_max, "schedule");
    Read(s, "t_min", c.schedule.random.t_min, "schedule");
    Read(s, "t_max", c.schedule.random.t_max, "schedule");
    if (s.contains("constant_frames")) {
      c.schedule.has_constant = true;
      Read(s, "constant_frames", c.schedule.constant_frames, "schedule");
    }
    if (s.contains("entries")) {
      if (!s["entries"].is_array()) throw ConfigError("'schedule.entries' must be an array");
      for (const json& e : s["entries"]) {
        DelayScheduleEntry entry;
        if (e.is_array() && e.size() == 2 && e[0].is_number_integer() &&
            e[1].is_number_integer()) {
          entry.d_n = e[0].get<int>();
          entry.t_n = e[1].get<int>();
        } else if (e.is_object()) {
          CheckKeys(e, "schedule.entries", {"d_n", "t_n"});
          Read(e, "d_n", entry.d_n, "schedule.entries");
          Read(e, "t_n", entry.t_n, "schedule.entries");
        } else {
          throw ConfigError("schedule entries must be [d_n, t_n] or {d_n, t_n}");
        }
        c.schedule.entries.push_back(entry);
      }
    }
  }
  if (j.contains("detector")) {
    const json& d = j["detector"];
    CheckKeys(d, "detector", {"haptic", "vision"});
    if (d.contains("haptic")) {
      const json& h = d["haptic"];
      CheckKeys(h, "detector.haptic",
                {"f_th", "kernel_size", "sigma", "near_zero_level", "refractory_ms",
                 "pre_window_ms"});
      HapticDetectorConfig& hc = c.haptic_detector;
      Read(h, "f_th", hc.f_th, "detector.haptic");
      Read(h, "kernel_size", hc.kernel_size, "detector.haptic");
      Read(h, "sigma", hc.sigma, "detector.haptic");
      Read(h, "near_zero_level", hc.near_zero_level, "detector.haptic");
      Read(h, "refractory_ms", hc.refractory_ms, "detector.haptic");
      Read(h, "pre_window_ms", hc.pre_window_ms, "detector.haptic");
    }
    if (d.contains("vision")) {
      const json& v = d["vision"];
      CheckKeys(v, "detector.vision", {"hand_label", "jitter_px", "drop_prob"});
      Read(v, "hand_label", c.vision_detector.hand_label, "detector.vision");
      Read(v, "jitter_px", c.vision_detector.jitter_px, "detector.vision");
      Read(v, "drop_prob", c.vision_detector.drop_prob, "detector.vision");
    }
  }
  if (j.contains("thresholds")) {
    const json& t = j["thresholds"];
    CheckKeys(t, "thresholds", {"d_alpha_ms", "d_beta_ms"});
    Read(t, "d_alpha_ms", c.thresholds.d_alpha_ms, "thresholds");
    Read(t, "d_beta_ms", c.thresholds.d_beta_ms, "thresholds");
  }
  if (j.contains("transport")) {
    const json& t = j["transport"];
    CheckKeys(t, "transport", {"kind"});
    std::string kind;
    Read(t, "kind", kind, "transport");
    if (!kind.empty()) c.transport = ParseTransportKind(kind);
  }
  if (j.contains("receiver")) {
    const json& r = j["receiver"];
    CheckKeys(r, "receiver", {"lookahead_frames", "buffer_capacity", "window_s", "pairing"});
    Read(r, "lookahead_frames", c.receiver.lookahead_frames, "receiver");
    Read(r, "buffer_capacity", c.receiver.buffer_capacity, "receiver");
    Read(r, "window_s", c.receiver.window_s, "receiver");
    std::string pairing;
    Read(r, "pairing", pairing, "receiver");
    if (!pairing.empty()) c.receiver.pairing = ParsePairingStrategy(pairing);
  }
  if (j.contains("stats")) {
    const json& s = j["stats"];
    CheckKeys(s, "stats",
              {"scores", "outlier_threshold", "saturation_trials", "saturation_kind"});
    Read(s, "scores", c.scores_path, "stats");
    Read(s, "outlier_threshold", c.outlier_threshold, "stats");
    Read(s, "saturation_trials", c.saturation_trials, "stats");
    std::string kind;
    Read(s, "saturation_kind", kind, "stats");
    if (!kind.empty()) c.saturation_kind = ParseCorrelationKind(kind);
  }
  return c;
}

json ExperimentConfig::ToJson() const {
  json entries = json::array();
  for (const DelayScheduleEntry& e : schedule.entries) entries.push_back({e.d_n, e.t_n});
  json sched = {{"kind", ToString(schedule.kind)},
                {"d_min", schedule.random.d_min},
                {"d_max", schedule.random.d_max},
                {"t_min", schedule.random.t_min},
                {"t_max", schedule.random.t_max},
                {"entries", entries}};
  if (schedule.has_constant) sched["constant_frames"] = schedule.constant_frames;
  return {
      {"mode", ToString(mode)},
      {"seed", seed},
      {"clips", clips},
      {"correction", correction},
      {"scene",
       {{"duration_s", scene.duration_s},
        {"gap_min_frames", scene.gap_min_frames},
        {"gap_max_frames", scene.gap_max_frames},
        {"contact_frames", scene.contact_frames},
        {"approach_frames", scene.approach_frames},
        {"rest_gap_px", scene.rest_gap_px},
        {"press_depth_px", scene.press_depth_px},
        {"press_s", scene.press_s},
        {"contact_stiffness", scene.contact_stiffness},
        {"baseline_force", scene.baseline_force},
        {"force_noise_sd", scene.force_noise_sd}}},
      {"rates", {{"haptic_hz", rates.haptic_hz}, {"frame_hz", rates.frame_hz}}},
      {"schedule", sched},
      {"detector",
       {{"haptic",
         {{"f_th", haptic_detector.f_th},
          {"kernel_size", haptic_detector.kernel_size},
          {"sigma", haptic_detector.sigma},
          {"near_zero_level", haptic_detector.near_zero_level},
          {"refractory_ms", haptic_detector.refractory_ms},
          {"pre_window_ms", haptic_detector.pre_window_ms}}},
        {"vision",
         {{"hand_label", vision_detector.hand_label},
          {"jitter_px", vision_detector.jitter_px},
          {"drop_prob", vision_detector.drop_prob}}}}},
      {"thresholds",
       {{"d_alpha_ms", thresholds.d_alpha_ms}, {"d_beta_ms", thresholds.d_beta_ms}}},
      {"transport", {{"kind", ToString(transport)}}},
      {"receiver",
       {{"lookahead_frames", receiver.lookahead_frames},
        {"buffer_capacity", receiver.buffer_capacity},
        {"window_s", receiver.window_s},
        {"pairing", ToString(receiver.pairing)}}},
  };
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return ExperimentConfig::FromJson(j);
}

SessionConfig MakeSessionConfig(const ExperimentConfig& cfg, bool correction,
                                uint64_t detector_seed) {
  SessionConfig s;
  s.haptic = cfg.haptic_detector;
  s.vision = cfg.vision_detector;
  s.thresholds = cfg.thresholds;
  s.frame_interval_ms = 1000.0 / cfg.rates.frame_hz;
  s.window_s = cfg.receiver.window_s;
  s.lookahead_frames = cfg.receiver.lookahead_frames;
  s.buffer_capacity = cfg.receiver.buffer_capacity;
  s.pairing = cfg.receiver.pairing;
  s.correction = correction;
  s.detector_seed = detector_seed;
  return s;
}

ClipInputs PrepareClip(const ExperimentConfig& cfg, int clip_id) {
  ClipInputs in;
  in.clip_id = clip_id;
  in.seed = DeriveSeed(cfg.seed, static_cast<uint64_t>(clip_id));

  TapSceneParams params = cfg.scene;
  params.frame_rate_hz = cfg.rates.frame_hz;
  const SceneScript script = MakeTapScene(params, StreamSeed(in.seed, Stream::kScene));
  in.scene = GenerateScene(script, cfg.rates.haptic_hz, cfg.rates.frame_hz,
                           StreamSeed(in.seed, Stream::kNoise));

  const int64_t clip_frames = static_cast<int64_t>(in.scene.frames.size());
  if (clip_frames == 0) throw ConfigError("scene is shorter than one frame");
  const uint64_t sched_seed = StreamSeed(in.seed, Stream::kSchedule);
  switch (cfg.schedule.kind) {
    case ScheduleKind::kRandom:
      in.schedule = RandomSchedule(sched_seed, clip_frames, cfg.schedule.random);
      break;
    case ScheduleKind::kConstant: {
      int d = cfg.schedule.constant_frames;
      if (!cfg.schedule.has_constant) {
        Rng rng(sched_seed);
        d = static_cast<int>(rng.UniformInt(cfg.schedule.random.d_min,
                                            cfg.schedule.random.d_max));
      }
      in.schedule = ConstantSchedule(d, clip_frames);
      break;
    }
    case ScheduleKind::kExample:
      in.schedule = ExampleSchedule();
      break;
    case ScheduleKind::kExplicit:
      in.schedule.entries = cfg.schedule.entries;
      break;
  }
  in.schedule.frame_interval_ms = 1000.0 / cfg.rates.frame_hz;
  if (in.schedule.TotalFrames() < clip_frames) {
    throw ConfigError("delay schedule covers " + std::to_string(in.schedule.TotalFrames()) +
                      " frames but the clip has " + std::to_string(clip_frames));
  }
  const std::vector<ReceivedFrame> received =
      ApplyDelaySchedule(in.scene.frames, in.schedule);

  if (cfg.transport == TransportKind::kNone) {
    in.delivered.haptic = in.scene.haptic;
    in.delivered.frames = received;
  } else {
    std::unique_ptr<Channel> channel = MakeChannel(cfg.transport, &in.transport_fell_back);
    in.delivered = TransmitStreams(in.scene.haptic, received, cfg.rates.frame_hz, *channel);
  }
  return in;
}

double ClipResult::EstimatedDelayMs() const {
  std::vector<double> d;
  for (const TimelinePair& p : off.pairs) d.push_back(p.delay_ms);
  return Median(std::move(d));
}

std::vector<ClipResult> RunClips(const ExperimentConfig& cfg) {
  cfg.Validate();
  std::vector<ClipResult> results(cfg.clips);
  std::vector<std::exception_ptr> errors(cfg.clips);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int id = next++; id < cfg.clips; id = next++) {
      try {
        ClipInputs in = PrepareClip(cfg, id);
        const uint64_t det_seed = StreamSeed(in.seed, Stream::kDetector);
        ClipResult& r = results[id];
        r.clip_id = id;
        r.seed = in.seed;
        r.schedule = in.schedule;
        r.transport_fell_back = in.transport_fell_back;
        r.off = RunSyncSession(in.delivered.haptic, in.delivered.frames,
                               MakeSessionConfig(cfg, false, det_seed));
        r.haptic_identical = r.off.haptic_played.samples == in.delivered.haptic.samples;
        if (cfg.correction) {
          r.on = RunSyncSession(in.delivered.haptic, in.delivered.frames,
                                MakeSessionConfig(cfg, true, det_seed));
          r.haptic_identical = r.haptic_identical &&
                               r.on->haptic_played.samples == in.delivered.haptic.samples;
        }
      } catch (...) {
        errors[id] = std::current_exception();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.clips);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

double SessionReport::MeanSyncOn() const {
  if (clips.empty() || !clips.front().on) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const ClipResult& c : clips) s += c.on->sync_fraction;
  return s / double(clips.size());
}

double SessionReport::MeanSyncOff() const {
  if (clips.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const ClipResult& c : clips) s += c.off.sync_fraction;
  return s / double(clips.size());
}

json SessionReport::ToJson() const {
  json out;
  out["config"] = config.ToJson();
  out["clips"] = json::array();
  bool all_identical = true;
  size_t pairs = 0, failures = 0;
  double mae_sum = 0.0;
  for (const ClipResult& c : clips) {
    json schedule = json::array();
    for (const DelayScheduleEntry& e : c.schedule.entries) schedule.push_back({e.d_n, e.t_n});
    json jc = {{"clip_id", c.clip_id},
               {"seed", c.seed},
               {"schedule", schedule},
               {"transport_fell_back", c.transport_fell_back},
               {"haptic_identical", c.haptic_identical},
               {"estimated_delay_ms", c.EstimatedDelayMs()},
               {"off", c.off.ToJson()}};
    if (c.on) jc["on"] = c.on->ToJson();
    out["clips"].push_back(std::move(jc));
    all_identical = all_identical && c.haptic_identical;
    const SessionTimeline& main = c.on ? *c.on : c.off;
    pairs += main.pairs.size();
    failures += main.failures.size();
    mae_sum += main.mae_ms;
  }
  out["summary"] = {
      {"clips", clips.size()},
      {"sync_fraction_on", MeanSyncOn()},
      {"sync_fraction_off", MeanSyncOff()},
      {"mae_ms", clips.empty() ? 0.0 : mae_sum / double(clips.size())},
      {"pairs", pairs},
      {"failures", failures},
      {"haptic_identical", all_identical},
  };
  return out;
}

std::string SessionReport::Dump() const { return ToJson().dump(2) + "\n"; }

SessionReport RunSession(const ExperimentConfig& cfg) {
  SessionReport r;
  r.config = cfg;
  r.clips = RunClips(cfg);
  return r;
}

}  // namespace haptisync
