#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.h"
#include "haptisync/experiment.h"

namespace {

void SetupLogging() {
  auto logger = spdlog::stderr_color_mt("haptisync");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HAPTISYNC_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  SetupLogging();

  CLI::App app{"Haptic-visual stream synchronization simulator"};
  std::string config_path, mode, out_dir, scores;
  std::optional<uint64_t> seed;
  std::optional<int> clips, threads;
  bool no_correction = false;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "estimate-delay | sync-probability | end-to-end | stats");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--clips", clips, "number of clips")->check(CLI::PositiveNumber);
  app.add_flag("--no-correction", no_correction, "disable the corrected run");
  app.add_option("--scores", scores, "score CSV (testee,stimulus,score) for stats");
  app.add_option("--threads", threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    haptisync::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = haptisync::LoadExperimentConfig(config_path);
    if (!mode.empty()) cfg.mode = haptisync::ParseExperimentMode(mode);
    if (seed) cfg.seed = *seed;
    if (clips) cfg.clips = *clips;
    if (threads) cfg.threads = *threads;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!scores.empty()) cfg.scores_path = scores;
    if (no_correction) cfg.correction = false;
    haptisync::cli::RunMode(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "haptisync: " << e.what() << '\n';
    return haptisync::cli::ExitCodeFor(e);
  }
  return 0;
}
