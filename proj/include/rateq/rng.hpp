#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

namespace rateq {

/// Counter-based SplitMix64 stream. A stream is identified by (seed,
/// stream id, substream id); the k-th output is a pure function of the key
/// and k, so draws are reproducible under any parallel schedule.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_(mix(mix(seed + kGolden) ^ mix(stream * kGolden + 0x632BE59BD9B4E019ull) ^
                 mix(substream + 0xD1B54A32D192ED03ull))) {}

  std::uint64_t nextU64() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1).
  double nextDouble() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  /// Standard normal via polar rejection; consumes a variable number of draws.
  double nextGaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * nextDouble() - 1.0;
      v = 2.0 * nextDouble() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  /// Index sampled from an unnormalized nonnegative weight vector.
  Eigen::Index sampleDiscrete(const Eigen::VectorXd& w) {
    double total = w.sum();
    double r = nextDouble() * total;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (r < acc) return i;
    }
    return w.size() - 1;
  }

  /// Dirichlet(1,...,1)-style random PMF via exponential draws.
  Eigen::VectorXd randomPmf(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = -std::log1p(-nextDouble());
    v /= v.sum();
    return v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream ids used across the simulator; documented here so seeds split the
/// same way everywhere.
enum : std::uint64_t {
  kStreamCodebook = 1,
  kStreamCodewordBins = 2,
  kStreamSequenceBins = 3,
  kStreamTrials = 4,
  kStreamMultiLetter = 5,
  kStreamHillClimb = 6,
  kStreamFixtures = 7,
};

}  // namespace rateq
