#ifndef HAPTISYNC_HAPTIC_H_
#define HAPTISYNC_HAPTIC_H_

#include <array>
#include <vector>

#include "haptisync/events.h"

namespace haptisync {

inline constexpr double kDefaultHapticRateHz = 1000.0;

// One kinesthetic force reading. Forces are normalized device units.
struct HapticSample {
  double t = 0.0;  // seconds, receiver-local playback time
  double fx = 0.0;
  double fy = 0.0;
  double fz = 0.0;

  double axis(int i) const { return i == 0 ? fx : (i == 1 ? fy : fz); }
  double& axis(int i) { return i == 0 ? fx : (i == 1 ? fy : fz); }

  bool operator==(const HapticSample&) const = default;
};

struct HapticTrace {
  std::vector<HapticSample> samples;
  double rate_hz = kDefaultHapticRateHz;

  bool empty() const { return samples.empty(); }
  size_t size() const { return samples.size(); }

  // Throws InputError unless timestamps are finite, non-negative, strictly
  // increasing and spaced 1/rate_hz apart (within 1 us).
  void Validate() const;
  bool operator==(const HapticTrace&) const = default;
};

struct HapticDetectorConfig {
  double f_th = 0.05;
  int kernel_size = 5;
  double sigma = 1.0;              // in samples
  double near_zero_level = 0.01;
  double refractory_ms = 200.0;
  double pre_window_ms = 50.0;

  void Validate() const;
};

// Sampled Gaussian of odd length `kernel_size`, normalized to unit sum.
std::vector<double> GaussianKernel(int kernel_size, double sigma);

// Convolves each axis with GaussianKernel(kernel_size, sigma), replicating
// the edge samples. Timestamps are copied unchanged.
HapticTrace GaussianSmooth(const HapticTrace& trace, int kernel_size,
                           double sigma);

// Finds key samples: after smoothing, the first difference of |force| on any
// axis exceeds f_th while that axis averaged below near_zero_level over the
// preceding pre_window_ms. Detections inside the refractory period of the
// previous event are dropped.
std::vector<KeyEvent> DetectKeySamples(const HapticTrace& trace,
                                       const HapticDetectorConfig& cfg);

}  // namespace haptisync

#endif  // HAPTISYNC_HAPTIC_H_
