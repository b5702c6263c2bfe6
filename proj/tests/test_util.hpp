#pragma once

#include <cmath>
#include <string>

#include "rateq/dist.hpp"
#include "rateq/rng.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) {
  return std::string(RATEQ_FIXTURE_DIR) + "/" + name;
}

/// Test-side oracle: binary entropy in bits, straight from the closed form.
inline double hb(double p) {
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (p < 1) h -= (1 - p) * std::log2(1 - p);
  return h;
}

/// Test-side oracle: plain-loop entropy, no compensation.
inline double entropyOracle(const Eigen::VectorXd& p) {
  double h = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 0) h -= p[i] * std::log2(p[i]);
  return h;
}

/// Programmatic DSBS source: Y uniform binary, X/Z/E through independent
/// binary symmetric channels from Y. Built by hand products, independent of
/// the io loader and of composeMarkov.
inline rateq::JointDist dsbsSource(double px = 0.1, double pz = 0.25, double pe = 0.3,
                                   bool xEqualsY = false, Eigen::Index eSize = 2) {
  rateq::AxisVec axes{{"x", 2}, {"y", 2}, {"z", 2}, {"e", eSize}};
  Eigen::VectorXd p(Eigen::Index(8 * eSize));
  Eigen::Index i = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (Eigen::Index e = 0; e < eSize; ++e) {
          double fx = xEqualsY ? (x == y ? 1.0 : 0.0) : (x == y ? 1 - px : px);
          double fz = z == y ? 1 - pz : pz;
          double fe = eSize == 1 ? 1.0 : (e == y ? 1 - pe : pe);
          p[i++] = 0.5 * fx * fz * fe;
        }
  return rateq::makeJoint(axes, p);
}

/// Seeded random source P(x,y,z) * P(e|y), the model's canonical structure.
inline rateq::JointDist randomComposedSource(std::uint64_t seed, Eigen::Index nx = 2,
                                             Eigen::Index ny = 2, Eigen::Index nz = 2,
                                             Eigen::Index ne = 2) {
  rateq::CounterRng rng(seed, rateq::kStreamFixtures);
  Eigen::VectorXd pxyz = rng.randomPmf(nx * ny * nz);
  Eigen::MatrixXd ey(ny, ne);
  for (Eigen::Index y = 0; y < ny; ++y) ey.row(y) = rng.randomPmf(ne).transpose();
  rateq::AxisVec axes{{"x", nx}, {"y", ny}, {"z", nz}, {"e", ne}};
  Eigen::VectorXd p(nx * ny * nz * ne);
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y)
      for (Eigen::Index z = 0; z < nz; ++z)
        for (Eigen::Index e = 0; e < ne; ++e)
          p[((x * ny + y) * nz + z) * ne + e] = pxyz[(x * ny + y) * nz + z] * ey(y, e);
  return rateq::makeJoint(axes, p);
}

/// Fully random joint over (x,y,z,e), no Markov structure.
inline rateq::JointDist randomFullSource(std::uint64_t seed, Eigen::Index nx = 2,
                                         Eigen::Index ny = 2, Eigen::Index nz = 2,
                                         Eigen::Index ne = 2) {
  rateq::CounterRng rng(seed, rateq::kStreamFixtures, 77);
  rateq::AxisVec axes{{"x", nx}, {"y", ny}, {"z", nz}, {"e", ne}};
  return rateq::makeJoint(axes, rng.randomPmf(nx * ny * nz * ne));
}

}  // namespace testutil
