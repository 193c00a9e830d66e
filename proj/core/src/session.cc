#include "haptisync/session.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>

#include "haptisync/error.h"

namespace haptisync {

namespace {

struct VisualKey {
  KeyEvent event;
  int64_t attach_entry = 0;
  bool matched = false;
  // Set once the carrying entry left the buffer.
  bool played = false;
  int64_t play_tick = 0;
  int64_t shift_at_play = 0;
};

struct Entry {
  int64_t receive_tick = 0;
  std::vector<size_t> keys;
};

int64_t ArrivalTick(double arrival_ms, double interval_ms) {
  return static_cast<int64_t>(std::ceil(arrival_ms / interval_ms - 1e-6));
}

}  // namespace

void SessionConfig::Validate() const {
  haptic.Validate();
  vision.Validate();
  thresholds.Validate();
  if (!(frame_interval_ms > 0.0) || !std::isfinite(frame_interval_ms)) {
    throw ConfigError("frame interval must be positive");
  }
  if (!(window_s > 0.0)) throw ConfigError("pairing window must be positive");
  if (lookahead_frames < 0) throw ConfigError("lookahead must be non-negative");
  if (buffer_capacity < 2 ||
      buffer_capacity < static_cast<size_t>(lookahead_frames) + 1) {
    throw ConfigError("buffer capacity must exceed the lookahead");
  }
}

std::vector<double> SessionTimeline::Offsets() const {
  std::vector<double> out;
  out.reserve(ticks.size());
  for (const TickRecord& t : ticks) {
    if (t.frame_index >= 0) out.push_back(t.offset_ms);
  }
  return out;
}

std::vector<int64_t> SessionTimeline::EmittedFrameIndices() const {
  std::vector<int64_t> out;
  for (const TickRecord& t : ticks) {
    if (t.frame_index >= 0) out.push_back(t.frame_index);
  }
  return out;
}

nlohmann::json SessionTimeline::ToJson() const {
  nlohmann::json j;
  j["pairs"] = nlohmann::json::array();
  for (const TimelinePair& p : pairs) {
    j["pairs"].push_back({
        {"tick", p.tick},
        {"t_h_ms", p.pair.haptic.t * 1000.0},
        {"t_v_ms", p.pair.visual.t * 1000.0},
        {"frame", p.pair.visual.source_index},
        {"delay_ms", p.delay_ms},
        {"truth_ms", p.truth_ms},
        {"status", ToString(p.status)},
        {"plan", {{"direction", ToString(p.plan.direction)},
                  {"ticks", p.plan.ticks}}},
    });
  }
  j["failures"] = nlohmann::json::array();
  for (const KeyEvent& f : failures) {
    j["failures"].push_back({{"t_h_ms", f.t * 1000.0}, {"sample", f.source_index}});
  }
  j["adjustments"] = nlohmann::json::array();
  for (const TimelineAdjustment& a : adjustments) {
    j["adjustments"].push_back({{"tick", a.tick},
                                {"action", ToString(a.action)},
                                {"underrun", a.underrun}});
  }
  j["summary"] = {
      {"sync_fraction", sync_fraction},
      {"mae_ms", mae_ms},
      {"pairs", pairs.size()},
      {"failures", failures.size()},
      {"ticks", ticks.size()},
      {"blank_ticks", blank_ticks},
      {"consumed", consumed},
      {"emitted", emitted},
      {"advance_ticks", advance_ticks},
      {"repeat_ticks", repeat_ticks},
      {"overflow_drops", overflow_drops},
  };
  return j;
}

SessionTimeline RunSyncSession(const HapticTrace& haptic,
                               std::span<const ReceivedFrame> frames,
                               const SessionConfig& cfg) {
  cfg.Validate();
  haptic.Validate();
  if (haptic.empty() && frames.empty()) {
    throw EmptyInputError("session needs at least one stream");
  }
  const double T = cfg.frame_interval_ms;
  const int64_t B = cfg.lookahead_frames;
  const double W = cfg.window_s * 1000.0;

  // Frames by index, with detector noise applied.
  std::vector<ReceivedFrame> by_index(frames.begin(), frames.end());
  std::sort(by_index.begin(), by_index.end(),
            [](const ReceivedFrame& a, const ReceivedFrame& b) {
              return a.frame.index < b.frame.index;
            });
  for (size_t i = 0; i < by_index.size(); ++i) {
    if (!std::isfinite(by_index[i].arrival_ms)) {
      throw InputError("non-finite arrival time");
    }
    if (i > 0 && by_index[i].frame.index == by_index[i - 1].frame.index) {
      throw InputError("duplicate frame index " +
                       std::to_string(by_index[i].frame.index));
    }
  }
  if (cfg.vision.jitter_px > 0.0 || cfg.vision.drop_prob > 0.0) {
    SyntheticDetector detector(cfg.vision, cfg.detector_seed);
    for (ReceivedFrame& rf : by_index) rf.frame.objects = detector.Detect(rf.frame);
  }

  int64_t n_ticks = 0;
  if (!by_index.empty()) n_ticks = by_index.back().frame.index + 1;
  if (!haptic.empty()) {
    n_ticks = std::max<int64_t>(
        n_ticks,
        static_cast<int64_t>(std::floor(haptic.samples.back().t * 1000.0 / T + 1e-9)) + 1);
  }
  const int64_t n_entries = n_ticks + B;

  // Newest frame arrived by each receive tick.
  std::vector<int64_t> arrival_tick(by_index.size());
  std::vector<std::pair<int64_t, size_t>> order;
  for (size_t i = 0; i < by_index.size(); ++i) {
    arrival_tick[i] = ArrivalTick(by_index[i].arrival_ms, T);
    order.emplace_back(arrival_tick[i], i);
  }
  std::sort(order.begin(), order.end());
  std::vector<std::optional<size_t>> newest(n_entries);
  {
    std::optional<size_t> best;
    size_t p = 0;
    for (int64_t m = 0; m < n_entries; ++m) {
      while (p < order.size() && order[p].first <= m) {
        if (!best || order[p].second > *best) best = order[p].second;
        ++p;
      }
      newest[m] = best;
    }
  }
  int64_t first_entry = n_entries;
  for (int64_t m = 0; m < n_entries; ++m) {
    if (newest[m]) {
      first_entry = m;
      break;
    }
  }

  // Visual key frames, attached to the receive tick at which both the key
  // frame and its predecessor have arrived.
  std::vector<VideoFrame> sorted_frames;
  sorted_frames.reserve(by_index.size());
  for (const ReceivedFrame& rf : by_index) sorted_frames.push_back(rf.frame);
  std::vector<VisualKey> vkeys;
  std::map<int64_t, std::vector<size_t>> keys_at_entry;
  {
    std::map<int64_t, size_t> pos;
    for (size_t i = 0; i < by_index.size(); ++i) pos[by_index[i].frame.index] = i;
    for (KeyEvent& e : DetectKeyFrames(sorted_frames, cfg.vision)) {
      const size_t i = pos.at(e.source_index);
      int64_t attach = arrival_tick[i];
      if (i > 0) attach = std::max(attach, arrival_tick[i - 1]);
      attach = std::max<int64_t>(attach, 0);
      keys_at_entry[attach].push_back(vkeys.size());
      vkeys.push_back(VisualKey{std::move(e), attach});
    }
  }

  const std::vector<KeyEvent> hkeys = DetectKeySamples(haptic, cfg.haptic);

  SessionTimeline tl;
  tl.haptic_played.rate_hz = haptic.rate_hz;
  tl.haptic_played.samples.reserve(haptic.size());
  tl.ticks.reserve(n_ticks);

  PlayoutController ctrl(cfg.thresholds, T, cfg.buffer_capacity);
  std::deque<Entry> meta;
  int64_t shift = 0;  // repeats minus advances so far

  auto mark_played = [&](const Entry& e, int64_t tick) {
    for (size_t id : e.keys) {
      vkeys[id].played = true;
      vkeys[id].play_tick = tick;
      vkeys[id].shift_at_play = shift;
    }
  };
  auto push_entry = [&](int64_t m, int64_t tick) {
    if (m < first_entry || m >= n_entries) return;
    const ReceivedFrame& rf = by_index[*newest[m]];
    Entry e{m, {}};
    if (auto it = keys_at_entry.find(m); it != keys_at_entry.end()) e.keys = it->second;
    if (ctrl.Push(rf.frame)) {
      mark_played(meta.front(), tick);
      meta.pop_front();
    }
    meta.push_back(std::move(e));
  };

  // Projected playback time (ms) of an unmatched known visual key event.
  auto visual_time = [&](size_t id, int64_t k) -> std::optional<double> {
    const VisualKey& v = vkeys[id];
    if (v.matched) return std::nullopt;
    if (v.played) return double(v.play_tick + (shift - v.shift_at_play)) * T;
    for (size_t q = 0; q < meta.size(); ++q) {
      for (size_t kid : meta[q].keys) {
        if (kid == id) {
          return double(std::max(k, first_entry) + static_cast<int64_t>(q)) * T;
        }
      }
    }
    return std::nullopt;
  };

  std::deque<KeyEvent> pending;
  size_t next_haptic = 0;

  auto commit = [&](const KeyEvent& h, size_t id, double tv_ms, int64_t k) {
    VisualKey& v = vkeys[id];
    v.matched = true;
    const double th_ms = h.t * 1000.0;
    TimelinePair p;
    p.tick = k;
    p.pair.haptic = h;
    p.pair.visual = v.event;
    p.pair.visual.t = tv_ms / 1000.0;
    p.delay_ms = tv_ms - th_ms;
    p.truth_ms = tv_ms - double(v.event.source_index) * T;
    p.status = CheckSync(DelayEstimate{p.delay_ms}, cfg.thresholds);
    p.plan = PlanAdjustment(DelayEstimate{p.delay_ms}, cfg.thresholds, T);
    if (cfg.correction) ctrl.Retarget(DelayEstimate{p.delay_ms});
    tl.pairs.push_back(std::move(p));
  };

  // Pairs the oldest pending haptic event with the best visual key known so
  // far (buffered or already played). With no candidate it waits until the
  // window has passed. Returns false while waiting.
  auto resolve_front = [&](int64_t k, bool final_pass) {
    const KeyEvent& h = pending.front();
    const double th_ms = h.t * 1000.0;
    const double now_ms = double(k) * T;
    const double horizon_ms =
        double(std::max(k, first_entry) + static_cast<int64_t>(meta.size()) - 1) * T;
    std::optional<size_t> best;
    double best_tv = 0.0;
    for (size_t id = 0; id < vkeys.size(); ++id) {
      const std::optional<double> tv = visual_time(id, k);
      if (!tv || std::abs(*tv - th_ms) > W) continue;
      bool better = !best;
      if (best) {
        better = cfg.pairing == PairingStrategy::kNearest
                     ? std::abs(*tv - th_ms) < std::abs(best_tv - th_ms)
                     : *tv < best_tv;
      }
      if (better) {
        best = id;
        best_tv = *tv;
      }
    }
    if (!best) {
      if (final_pass || now_ms > th_ms + W || horizon_ms > th_ms + W) {
        tl.failures.push_back(h);
        pending.pop_front();
        return true;
      }
      return false;
    }
    const KeyEvent ev = h;
    pending.pop_front();
    commit(ev, *best, best_tv, k);
    return true;
  };

  for (int64_t m = 0; m < B; ++m) push_entry(m, 0);

  size_t next_sample = 0;
  int64_t in_sync = 0;
  for (int64_t k = 0; k < n_ticks; ++k) {
    push_entry(k + B, k);

    const double reveal_ms = double(k + B) * T;
    while (next_haptic < hkeys.size() &&
           hkeys[next_haptic].t * 1000.0 <= reveal_ms + 1e-9) {
      pending.push_back(hkeys[next_haptic++]);
    }
    while (!pending.empty() && resolve_front(k, false)) {
    }

    TickRecord rec;
    rec.tick = k;
    if (k >= first_entry && ctrl.size() + (ctrl.last_emitted() ? 1 : 0) > 0) {
      const PlayoutAction a = ctrl.Step(k);
      switch (a.kind) {
        case PlayoutActionKind::kEmitSkip:
          --shift;
          tl.adjustments.push_back({k, a.kind, false});
          break;
        case PlayoutActionKind::kEmitRepeat:
          ++shift;
          tl.adjustments.push_back({k, a.kind, a.underrun});
          break;
        case PlayoutActionKind::kEmitNext:
          break;
      }
      for (int c = 0; c < a.consumed; ++c) {
        mark_played(meta.front(), k);
        meta.pop_front();
      }
      rec.frame_index = a.frame.index;
      rec.action = a.kind;
      rec.offset_ms = double(k - a.frame.index) * T;
      rec.in_sync = cfg.thresholds.Inside(rec.offset_ms);
      if (rec.in_sync) ++in_sync;
    } else {
      ++tl.blank_ticks;
    }
    tl.ticks.push_back(rec);

    const double tick_end_s = double(k + 1) * T / 1000.0;
    while (next_sample < haptic.size() &&
           haptic.samples[next_sample].t < tick_end_s) {
      tl.haptic_played.samples.push_back(haptic.samples[next_sample++]);
    }
  }
  while (next_sample < haptic.size()) {
    tl.haptic_played.samples.push_back(haptic.samples[next_sample++]);
  }
  while (next_haptic < hkeys.size()) pending.push_back(hkeys[next_haptic++]);
  while (!pending.empty()) resolve_front(n_ticks, true);

  const int64_t shown = n_ticks - tl.blank_ticks;
  tl.sync_fraction = shown > 0 ? double(in_sync) / double(shown) : 0.0;
  if (!tl.pairs.empty()) {
    double sum = 0.0;
    for (const TimelinePair& p : tl.pairs) sum += std::abs(p.delay_ms - p.truth_ms);
    tl.mae_ms = sum / double(tl.pairs.size());
  }
  tl.consumed = ctrl.consumed();
  tl.emitted = ctrl.emitted();
  tl.advance_ticks = ctrl.advance_ticks();
  tl.repeat_ticks = ctrl.repeat_ticks();
  tl.overflow_drops = ctrl.overflow_drops();
  return tl;
}

}  // namespace haptisync
