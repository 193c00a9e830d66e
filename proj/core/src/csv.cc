#include "haptisync/csv.h"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "haptisync/error.h"

namespace haptisync {

namespace {

std::string Trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double ParseDouble(const std::string& field, const char* name, int line) {
  const std::string f = Trim(field);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
    throw ParseError(std::string("bad ") + name + " value '" + f + "'", line);
  }
  return v;
}

int64_t ParseInt(const std::string& field, const char* name, int line) {
  const std::string f = Trim(field);
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw ParseError(std::string("bad ") + name + " value '" + f + "'", line);
  }
  return v;
}

// Reads the header line and checks it.
void ExpectHeader(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header '" + expected + "'", 1);
  std::string got;
  for (const std::string& f : SplitCsvLine(line)) {
    if (!got.empty()) got += ',';
    got += Trim(f);
  }
  if (!got.empty() && static_cast<unsigned char>(got[0]) == 0xEF && got.size() >= 3) {
    got = got.substr(3);  // UTF-8 BOM
  }
  if (got != expected) {
    throw ParseError("expected header '" + expected + "', got '" + got + "'", 1);
  }
}

std::vector<std::string> Fields(const std::string& line, size_t n, int lineno) {
  std::vector<std::string> f = SplitCsvLine(line);
  if (f.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " fields, got " +
                         std::to_string(f.size()),
                     lineno);
  }
  return f;
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != '\n') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

HapticTrace ReadHapticCsv(std::istream& in) {
  ExpectHeader(in, "t_ms,fx,fy,fz");
  HapticTrace trace;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    const auto f = Fields(line, 4, lineno);
    trace.samples.push_back(HapticSample{ParseDouble(f[0], "t_ms", lineno) / 1000.0,
                                         ParseDouble(f[1], "fx", lineno),
                                         ParseDouble(f[2], "fy", lineno),
                                         ParseDouble(f[3], "fz", lineno)});
  }
  if (trace.samples.size() >= 2) {
    trace.rate_hz = 1.0 / (trace.samples[1].t - trace.samples[0].t);
    // Snap to a whole rate when the file stores rounded milliseconds.
    const double rounded = std::round(trace.rate_hz);
    if (std::abs(trace.rate_hz - rounded) < 1e-6 * rounded) trace.rate_hz = rounded;
  }
  trace.Validate();
  return trace;
}

void WriteHapticCsv(std::ostream& out, const HapticTrace& trace) {
  out << "t_ms,fx,fy,fz\n";
  for (const HapticSample& s : trace.samples) {
    out << FormatDouble(s.t * 1000.0) << ',' << FormatDouble(s.fx) << ','
        << FormatDouble(s.fy) << ',' << FormatDouble(s.fz) << '\n';
  }
}

std::vector<VideoFrame> ReadFrameCsv(std::istream& in) {
  ExpectHeader(in, "frame,t_ms,label,x,y,w,h");
  std::vector<VideoFrame> frames;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    const auto f = Fields(line, 7, lineno);
    const int64_t index = ParseInt(f[0], "frame", lineno);
    if (index < 0) throw ParseError("negative frame index", lineno);
    const double t = ParseDouble(f[1], "t_ms", lineno) / 1000.0;
    if (frames.empty() || frames.back().index != index) {
      if (!frames.empty() && index < frames.back().index) {
        throw ParseError("frames must be sorted by index", lineno);
      }
      VideoFrame fr;
      fr.index = index;
      fr.t = t;
      frames.push_back(std::move(fr));
    }
    const std::string label = Trim(f[2]);
    if (label.empty()) {
      for (size_t i = 3; i < 7; ++i) {
        if (!Trim(f[i]).empty()) throw ParseError("box fields without a label", lineno);
      }
      continue;
    }
    BoundingBox b{ParseDouble(f[3], "x", lineno), ParseDouble(f[4], "y", lineno),
                  ParseDouble(f[5], "w", lineno), ParseDouble(f[6], "h", lineno), label};
    if (!b.Valid()) throw ParseError("box needs positive width and height", lineno);
    frames.back().objects.push_back(std::move(b));
  }
  return frames;
}

void WriteFrameCsv(std::ostream& out, std::span<const VideoFrame> frames) {
  out << "frame,t_ms,label,x,y,w,h\n";
  for (const VideoFrame& f : frames) {
    const std::string head = std::to_string(f.index) + ',' + FormatDouble(f.t * 1000.0);
    if (f.objects.empty()) {
      out << head << ",,,,,\n";
      continue;
    }
    for (const BoundingBox& b : f.objects) {
      out << head << ',' << b.label << ',' << FormatDouble(b.x) << ','
          << FormatDouble(b.y) << ',' << FormatDouble(b.w) << ',' << FormatDouble(b.h)
          << '\n';
    }
  }
}

ScoreMatrix ReadScoreCsv(std::istream& in) {
  ExpectHeader(in, "testee,stimulus,score");
  ScoreMatrix m;
  std::map<std::string, size_t> testee_row, stimulus_col;
  std::map<std::pair<size_t, size_t>, double> cells;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    const auto f = Fields(line, 3, lineno);
    const std::string testee = Trim(f[0]);
    const std::string stimulus = Trim(f[1]);
    if (testee.empty() || stimulus.empty()) {
      throw ParseError("testee and stimulus must not be empty", lineno);
    }
    const double score = ParseDouble(f[2], "score", lineno);
    if (score < 0.0 || score > 10.0) throw ParseError("score outside [0, 10]", lineno);
    auto [ti, t_new] = testee_row.try_emplace(testee, m.testees.size());
    if (t_new) m.testees.push_back(testee);
    auto [si, s_new] = stimulus_col.try_emplace(stimulus, m.stimuli.size());
    if (s_new) m.stimuli.push_back(stimulus);
    if (!cells.emplace(std::make_pair(ti->second, si->second), score).second) {
      throw ParseError("duplicate score for " + testee + "/" + stimulus, lineno);
    }
  }
  if (m.testees.empty()) throw ParseError("no scores", lineno);
  m.scores.assign(m.testees.size(), std::vector<double>(m.stimuli.size()));
  for (size_t t = 0; t < m.testees.size(); ++t) {
    for (size_t s = 0; s < m.stimuli.size(); ++s) {
      auto it = cells.find({t, s});
      if (it == cells.end()) {
        throw ParseError("missing score for " + m.testees[t] + "/" + m.stimuli[s], 0);
      }
      m.scores[t][s] = it->second;
    }
  }
  return m;
}

void WriteScoreCsv(std::ostream& out, const ScoreMatrix& m) {
  out << "testee,stimulus,score\n";
  for (size_t t = 0; t < m.scores.size(); ++t) {
    for (size_t s = 0; s < m.scores[t].size(); ++s) {
      const std::string tn = t < m.testees.size() ? m.testees[t] : std::to_string(t + 1);
      const std::string sn = s < m.stimuli.size() ? m.stimuli[s] : std::to_string(s + 1);
      out << tn << ',' << sn << ',' << FormatDouble(m.scores[t][s]) << '\n';
    }
  }
}

}  // namespace haptisync
