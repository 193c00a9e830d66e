#include "haptisync/haptic.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "haptisync/error.h"

namespace haptisync {

namespace {

constexpr const char* kAxisNames[3] = {"x", "y", "z"};

}  // namespace

const char* ToString(EventKind kind) {
  return kind == EventKind::kHaptic ? "haptic" : "visual";
}

void HapticTrace::Validate() const {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw InputError("haptic rate must be positive");
  }
  const double spacing = 1.0 / rate_hz;
  for (size_t i = 0; i < samples.size(); ++i) {
    const HapticSample& s = samples[i];
    if (!std::isfinite(s.t) || s.t < 0.0) {
      throw InputError("haptic sample " + std::to_string(i) +
                       " has an invalid timestamp");
    }
    if (!std::isfinite(s.fx) || !std::isfinite(s.fy) || !std::isfinite(s.fz)) {
      throw InputError("haptic sample " + std::to_string(i) +
                       " has a non-finite force");
    }
    if (i > 0) {
      const double dt = s.t - samples[i - 1].t;
      if (dt <= 0.0 || std::abs(dt - spacing) > 1e-6) {
        throw InputError("haptic sample " + std::to_string(i) +
                         " breaks the 1/rate spacing");
      }
    }
  }
}

void HapticDetectorConfig::Validate() const {
  if (!(f_th > 0.0)) throw ConfigError("f_th must be positive");
  if (kernel_size < 3 || kernel_size % 2 == 0) {
    throw ConfigError("kernel_size must be odd and >= 3");
  }
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(near_zero_level > 0.0)) {
    throw ConfigError("near_zero_level must be positive");
  }
  if (!(refractory_ms >= 0.0)) {
    throw ConfigError("refractory_ms must be non-negative");
  }
  if (!(pre_window_ms >= 0.0)) {
    throw ConfigError("pre_window_ms must be non-negative");
  }
}

std::vector<double> GaussianKernel(int kernel_size, double sigma) {
  if (kernel_size < 3 || kernel_size % 2 == 0) {
    throw ConfigError("kernel_size must be odd and >= 3, got " +
                      std::to_string(kernel_size));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive");
  }
  const int half = kernel_size / 2;
  std::vector<double> w(kernel_size);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    w[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += w[i + half];
  }
  for (double& x : w) x /= sum;
  return w;
}

HapticTrace GaussianSmooth(const HapticTrace& trace, int kernel_size,
                           double sigma) {
  const std::vector<double> w = GaussianKernel(kernel_size, sigma);
  if (trace.empty()) throw EmptyInputError("cannot smooth an empty trace");
  const int64_t n = static_cast<int64_t>(trace.size());
  const int half = kernel_size / 2;
  HapticTrace out = trace;
  for (int64_t i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        int64_t j = i + k;
        if (j < 0) j = 0;
        if (j >= n) j = n - 1;
        acc += w[k + half] * trace.samples[j].axis(a);
      }
      out.samples[i].axis(a) = acc;
    }
  }
  return out;
}

std::vector<KeyEvent> DetectKeySamples(const HapticTrace& trace,
                                       const HapticDetectorConfig& cfg) {
  cfg.Validate();
  std::vector<KeyEvent> events;
  if (trace.size() < 2) return events;
  const HapticTrace smooth = GaussianSmooth(trace, cfg.kernel_size, cfg.sigma);
  const int64_t n = static_cast<int64_t>(smooth.size());

  const int64_t pre =
      std::max<int64_t>(1, std::llround(cfg.pre_window_ms * trace.rate_hz / 1000.0));
  const int64_t refractory =
      std::llround(cfg.refractory_ms * trace.rate_hz / 1000.0);

  // Prefix sums of |force| per axis for O(1) window means.
  std::vector<double> prefix[3];
  for (int a = 0; a < 3; ++a) {
    prefix[a].assign(n + 1, 0.0);
    for (int64_t i = 0; i < n; ++i) {
      prefix[a][i + 1] = prefix[a][i] + std::abs(smooth.samples[i].axis(a));
    }
  }

  int64_t last = -1;
  for (int64_t i = 1; i < n; ++i) {
    if (last >= 0 && i - last < refractory) continue;
    for (int a = 0; a < 3; ++a) {
      const double diff = std::abs(smooth.samples[i].axis(a)) -
                          std::abs(smooth.samples[i - 1].axis(a));
      if (!(diff > cfg.f_th)) continue;
      const int64_t lo = std::max<int64_t>(0, i - pre);
      const double mean = (prefix[a][i] - prefix[a][lo]) / double(i - lo);
      if (!(mean < cfg.near_zero_level)) continue;
      events.push_back(KeyEvent{EventKind::kHaptic, smooth.samples[i].t, i,
                                kAxisNames[a]});
      last = i;
      break;
    }
  }
  return events;
}

}  // namespace haptisync
