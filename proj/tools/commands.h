#ifndef HAPTISYNC_TOOLS_COMMANDS_H_
#define HAPTISYNC_TOOLS_COMMANDS_H_

#include <ostream>

#include "haptisync/experiment.h"

namespace haptisync::cli {

// Each command writes its JSON/CSV outputs under cfg.output_dir (created if
// needed) and a short human-readable summary to `out`. Errors propagate as
// exceptions; see ExitCodeFor().

// delay_report.json, delay_clips.csv
void RunEstimateDelay(ExperimentConfig cfg, std::ostream& out);
// sync_probability.json, offset_timeline.csv
void RunSyncProbability(const ExperimentConfig& cfg, std::ostream& out);
// session_report.json, offset_timeline.csv
void RunEndToEnd(const ExperimentConfig& cfg, std::ostream& out);
// stats.json, mos.csv, saturation.csv, testee_correlation.csv
void RunStats(const ExperimentConfig& cfg, std::ostream& out);

void RunMode(const ExperimentConfig& cfg, std::ostream& out);

// 2 for configuration and input errors, 1 for everything else.
int ExitCodeFor(const std::exception& e);

}  // namespace haptisync::cli

#endif  // HAPTISYNC_TOOLS_COMMANDS_H_
