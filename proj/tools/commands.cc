#include "commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <spdlog/spdlog.h>

#include "haptisync/csv.h"
#include "haptisync/error.h"
#include "haptisync/metrics.h"

namespace haptisync::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path OutputDir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.output_dir + "'");
  return dir;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
  spdlog::info("wrote {}", path.string());
}

std::string Num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string OffsetTimelineCsv(const std::vector<ClipResult>& clips) {
  std::ostringstream os;
  os << "clip,tick,offset_on_ms,offset_off_ms,in_sync_on,in_sync_off\n";
  for (const ClipResult& c : clips) {
    for (size_t k = 0; k < c.off.ticks.size(); ++k) {
      const TickRecord& off = c.off.ticks[k];
      os << c.clip_id << ',' << off.tick << ',';
      if (c.on && c.on->ticks[k].frame_index >= 0) os << Num(c.on->ticks[k].offset_ms);
      os << ',';
      if (off.frame_index >= 0) os << Num(off.offset_ms);
      os << ',';
      if (c.on && c.on->ticks[k].frame_index >= 0) os << (c.on->ticks[k].in_sync ? 1 : 0);
      os << ',';
      if (off.frame_index >= 0) os << (off.in_sync ? 1 : 0);
      os << '\n';
    }
  }
  return os.str();
}

void CheckHapticInvariance(const std::vector<ClipResult>& clips) {
  for (const ClipResult& c : clips) {
    if (!c.haptic_identical) {
      throw Error("clip " + std::to_string(c.clip_id) +
                  ": played haptic stream differs from the received one");
    }
  }
}

}  // namespace

void RunEstimateDelay(ExperimentConfig cfg, std::ostream& out) {
  if (cfg.schedule.kind == ScheduleKind::kRandom) cfg.schedule.kind = ScheduleKind::kConstant;
  cfg.correction = false;
  const fs::path dir = OutputDir(cfg);
  const std::vector<ClipResult> clips = RunClips(cfg);
  CheckHapticInvariance(clips);
  const double T = 1000.0 / cfg.rates.frame_hz;

  std::vector<double> est, truth;
  json jclips = json::array();
  std::ostringstream csv;
  csv << "clip,injected_frames,truth_ms,estimate_ms,error_ms,pairs,failures\n";
  size_t unestimated = 0;
  for (const ClipResult& c : clips) {
    double t;
    int injected = 0;
    if (c.schedule.entries.size() == 1) {
      injected = c.schedule.entries[0].d_n;
      t = injected * T;
    } else {
      std::vector<double> truths;
      for (const TimelinePair& p : c.off.pairs) truths.push_back(p.truth_ms);
      std::sort(truths.begin(), truths.end());
      t = truths.empty() ? std::nan("") : truths[truths.size() / 2];
    }
    const double e = c.EstimatedDelayMs();
    const double err = e - t;
    if (std::isnan(e) || std::isnan(t)) {
      ++unestimated;
    } else {
      est.push_back(e);
      truth.push_back(t);
    }
    jclips.push_back({{"clip_id", c.clip_id},
                      {"injected_frames", injected},
                      {"truth_ms", t},
                      {"estimate_ms", e},
                      {"error_ms", err},
                      {"pairs", c.off.pairs.size()},
                      {"failures", c.off.failures.size()}});
    csv << c.clip_id << ',' << injected << ',' << Num(t) << ',' << Num(e) << ','
        << Num(err) << ',' << c.off.pairs.size() << ',' << c.off.failures.size() << '\n';
  }
  json report = {{"clips", jclips}, {"unestimated", unestimated}};
  DelayErrorReport r;
  if (!est.empty()) {
    r = MaeMaxAe(est, truth);
    report["n"] = r.n;
    report["mae_ms"] = r.mae_ms;
    report["max_ae_ms"] = r.max_ae_ms;
  }
  WriteFile(dir / "delay_report.json", report.dump(2) + "\n");
  WriteFile(dir / "delay_clips.csv", csv.str());
  out << "estimate-delay: " << clips.size() << " clips, MAE " << Num(r.mae_ms)
      << " ms, MaxAE " << Num(r.max_ae_ms) << " ms";
  if (unestimated) out << ", " << unestimated << " without an estimate";
  out << '\n';
}

void RunSyncProbability(const ExperimentConfig& cfg, std::ostream& out) {
  const fs::path dir = OutputDir(cfg);
  SessionReport rep;
  rep.config = cfg;
  rep.clips = RunClips(cfg);
  CheckHapticInvariance(rep.clips);
  json jclips = json::array();
  for (const ClipResult& c : rep.clips) {
    json jc = {{"clip_id", c.clip_id}, {"off", c.off.sync_fraction}};
    if (c.on) jc["on"] = c.on->sync_fraction;
    jclips.push_back(std::move(jc));
  }
  const double on = rep.MeanSyncOn();
  const double off = rep.MeanSyncOff();
  json report = {{"clips", jclips}, {"off", off}};
  if (cfg.correction) {
    report["on"] = on;
    report["gap"] = on - off;
  }
  WriteFile(dir / "sync_probability.json", report.dump(2) + "\n");
  WriteFile(dir / "offset_timeline.csv", OffsetTimelineCsv(rep.clips));
  out << "sync-probability: " << rep.clips.size() << " clips, ";
  if (cfg.correction) out << "with correction " << Num(on) << ", ";
  out << "without " << Num(off) << '\n';
}

void RunEndToEnd(const ExperimentConfig& cfg, std::ostream& out) {
  const fs::path dir = OutputDir(cfg);
  const SessionReport rep = RunSession(cfg);
  CheckHapticInvariance(rep.clips);
  WriteFile(dir / "session_report.json", rep.Dump());
  WriteFile(dir / "offset_timeline.csv", OffsetTimelineCsv(rep.clips));
  out << "end-to-end: " << rep.clips.size() << " clips, sync fraction ";
  if (cfg.correction) out << "on " << Num(rep.MeanSyncOn()) << ", ";
  out << "off " << Num(rep.MeanSyncOff()) << '\n';
}

void RunStats(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.scores_path.empty()) throw ConfigError("stats mode needs --scores");
  std::ifstream in(cfg.scores_path);
  if (!in) throw InputError("cannot open score file '" + cfg.scores_path + "'");
  const ScoreMatrix m = ReadScoreCsv(in);
  const fs::path dir = OutputDir(cfg);

  const OutlierScreening s = ScreenOutliers(m, cfg.outlier_threshold);
  const ScoreMatrix kept = m.Select(s.included);
  std::vector<SaturationPoint> curve;
  if (kept.num_testees() >= 2) {
    curve = DataSaturation(kept, cfg.seed, cfg.saturation_trials, cfg.saturation_kind);
  }

  json report;
  report["testees"] = m.testees;
  report["stimuli"] = m.stimuli;
  report["threshold"] = cfg.outlier_threshold;
  json inc = json::array(), exc = json::array(), corr = json::object();
  for (size_t i : s.included) inc.push_back(m.testees[i]);
  for (size_t i : s.excluded) exc.push_back(m.testees[i]);
  for (size_t i = 0; i < m.testees.size(); ++i) corr[m.testees[i]] = s.correlation[i];
  report["included"] = inc;
  report["excluded"] = exc;
  report["correlation"] = corr;
  report["mos"] = s.mos;
  json sat = json::array();
  for (const SaturationPoint& p : curve) sat.push_back({{"k", p.k}, {"correlation", p.correlation}});
  report["saturation"] = {{"kind", ToString(cfg.saturation_kind)},
                          {"trials", cfg.saturation_trials},
                          {"curve", sat}};
  WriteFile(dir / "stats.json", report.dump(2) + "\n");

  std::ostringstream mos;
  mos << "stimulus,mos\n";
  for (size_t i = 0; i < m.stimuli.size(); ++i) mos << m.stimuli[i] << ',' << Num(s.mos[i]) << '\n';
  WriteFile(dir / "mos.csv", mos.str());

  std::ostringstream sc;
  sc << "k,correlation\n";
  for (const SaturationPoint& p : curve) sc << p.k << ',' << Num(p.correlation) << '\n';
  WriteFile(dir / "saturation.csv", sc.str());

  std::ostringstream tc;
  tc << "testee,plcc,excluded\n";
  for (size_t i = 0; i < m.testees.size(); ++i) {
    const bool excluded =
        std::find(s.excluded.begin(), s.excluded.end(), i) != s.excluded.end();
    tc << m.testees[i] << ',' << Num(s.correlation[i]) << ',' << (excluded ? 1 : 0) << '\n';
  }
  WriteFile(dir / "testee_correlation.csv", tc.str());

  out << "stats: " << m.num_testees() << " testees, " << s.excluded.size() << " excluded";
  for (size_t i : s.excluded) out << ' ' << m.testees[i];
  out << '\n';
}

void RunMode(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.Validate();
  switch (cfg.mode) {
    case ExperimentMode::kEstimateDelay:
      RunEstimateDelay(cfg, out);
      break;
    case ExperimentMode::kSyncProbability:
      RunSyncProbability(cfg, out);
      break;
    case ExperimentMode::kEndToEnd:
      RunEndToEnd(cfg, out);
      break;
    case ExperimentMode::kStats:
      RunStats(cfg, out);
      break;
  }
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e) ||
      dynamic_cast<const DecodeError*>(&e) ||
      dynamic_cast<const UndefinedCorrelationError*>(&e) ||
      dynamic_cast<const DegeneratePanelError*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace haptisync::cli
