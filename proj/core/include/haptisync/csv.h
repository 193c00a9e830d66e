#ifndef HAPTISYNC_CSV_H_
#define HAPTISYNC_CSV_H_

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "haptisync/haptic.h"
#include "haptisync/metrics.h"
#include "haptisync/vision.h"

namespace haptisync {

// t_ms,fx,fy,fz
HapticTrace ReadHapticCsv(std::istream& in);
void WriteHapticCsv(std::ostream& out, const HapticTrace& trace);

// frame,t_ms,label,x,y,w,h. A frame without boxes is one row with empty
// label and box fields.
std::vector<VideoFrame> ReadFrameCsv(std::istream& in);
void WriteFrameCsv(std::ostream& out, std::span<const VideoFrame> frames);

// testee,stimulus,score. Testees and stimuli keep first-appearance order;
// every testee must score every stimulus exactly once.
ScoreMatrix ReadScoreCsv(std::istream& in);
void WriteScoreCsv(std::ostream& out, const ScoreMatrix& m);

// Splits one line on commas. No quoting support.
std::vector<std::string> SplitCsvLine(const std::string& line);

}  // namespace haptisync

#endif  // HAPTISYNC_CSV_H_
