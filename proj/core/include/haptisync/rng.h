#ifndef HAPTISYNC_RNG_H_
#define HAPTISYNC_RNG_H_

#include <cstdint>
#include <random>

namespace haptisync {

// Seeded generator on top of mt19937_64 with portable conversions to uniform
// reals, integers and normals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform01();
  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  // Uniform integer in [lo, hi], unbiased.
  int64_t UniformInt(int64_t lo, int64_t hi);
  bool Bernoulli(double p) { return Uniform01() < p; }
  double Normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Derives an independent stream seed from a base seed and a stream id
// (splitmix64 finalizer).
uint64_t DeriveSeed(uint64_t base, uint64_t stream);

}  // namespace haptisync

#endif  // HAPTISYNC_RNG_H_
