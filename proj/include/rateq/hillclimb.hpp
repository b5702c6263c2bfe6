#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "rateq/defaults.hpp"
#include "rateq/region.hpp"
#include "rateq/rng.hpp"

namespace rateq {

/// Euclidean projection of each row onto the probability simplex.
inline void projectRowsToSimplex(Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.cols();
  std::vector<double> u(static_cast<size_t>(n));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index i = 0; i < n; ++i) u[static_cast<size_t>(i)] = rows(r, i);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0, theta = 0;
    int rho = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      css += u[static_cast<size_t>(i)];
      double t = (css - 1.0) / static_cast<double>(i + 1);
      if (u[static_cast<size_t>(i)] - t > 0) {
        rho = static_cast<int>(i + 1);
        theta = t;
      }
    }
    (void)rho;
    for (Eigen::Index i = 0; i < n; ++i) rows(r, i) = std::max(rows(r, i) - theta, 0.0);
    double s = rows.row(r).sum();
    rows.row(r) /= s;  // guard rounding
  }
}

/// Independent cross-check of the grid LP: seeded random restarts of
/// projected-gradient ascent over the raw channel entries, scored through
/// the attach + information-measure route rather than per-atom scores.
/// |U| is the cardinality bound for the mode.
inline double hillClimbUGain(const JointDist& src, Mode mode, std::uint64_t seed,
                             int restarts = defaults::kHillClimbRestarts,
                             int iters = defaults::kHillClimbIters) {
  requireSourceAxes(src);
  const Eigen::Index nx = src.axes[0].size, ny = src.axes[1].size;
  const bool yOnly = uConditionsOnYOnly(mode);
  const Eigen::Index nin = yOnly ? ny : nx * ny;
  const Eigen::Index nu = nin + 1;
  const AxisVec from = yOnly ? AxisVec{{"y", ny}} : AxisVec{{"x", nx}, {"y", ny}};

  auto objective = [&](const Eigen::MatrixXd& rows) {
    Channel ch{from, Axis{"u", nu}, rows, std::vector<char>(rows.rows(), 1)};
    return uGain(attachAux(src, ch, "u"), mode, /*checkStructure=*/false);
  };

  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, kStreamHillClimb, static_cast<std::uint64_t>(r));
    Eigen::MatrixXd rows(nin, nu);
    for (Eigen::Index i = 0; i < nin; ++i) rows.row(i) = rng.randomPmf(nu).transpose();
    double val = objective(rows);
    double step = 0.5;
    Eigen::MatrixXd grad(nin, nu), cand(nin, nu);
    const double h = 1e-6;
    for (int it = 0; it < iters; ++it) {
      for (Eigen::Index i = 0; i < nin; ++i) {
        for (Eigen::Index u = 0; u < nu; ++u) {
          cand = rows;
          cand(i, u) += h;
          cand.row(i) /= cand.row(i).sum();
          grad(i, u) = (objective(cand) - val) / h;
        }
      }
      cand = rows + step * grad;
      projectRowsToSimplex(cand);
      double v = objective(cand);
      if (v > val + 1e-14) {
        rows.swap(cand);
        val = v;
        step = std::min(step * 1.2, 4.0);
      } else {
        step *= 0.5;
        if (step < 1e-9) break;
      }
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace rateq
