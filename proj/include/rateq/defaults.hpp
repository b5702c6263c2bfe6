#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace rateq::defaults {

// The one defaults table. Every tunable the CLI or library falls back on
// lives here; modules carry no hidden constants.

/// Simplex-grid denominator by posterior dimension (cells of the simplex).
inline int gridResolution(Eigen::Index posteriorCells) {
  if (posteriorCells <= 3) return 24;
  if (posteriorCells == 4) return 8;
  if (posteriorCells <= 6) return 5;
  return 3;
}

/// Strong-typicality slack by blocklength.
inline double deltaTyp(int n) { return n <= 8 ? 0.1 : 0.05; }

inline constexpr double kEps = 0.1;                   // rate slack
inline constexpr double kVerifyTolerance = 1e-9;      // identity residual gate
inline constexpr int kVerifySeeds = 50;
inline constexpr std::int64_t kStateGuard = 10'000'000;   // exhaustive-enumeration cap
inline constexpr std::int64_t kCodebookMax = std::int64_t(1) << 31;
inline constexpr std::int64_t kSequenceSpaceMax = std::int64_t(1) << 24;
inline constexpr int kHillClimbRestarts = 40;
inline constexpr int kHillClimbIters = 250;

}  // namespace rateq::defaults
