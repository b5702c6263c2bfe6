#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rateq/defaults.hpp"
#include "rateq/dist.hpp"
#include "rateq/info.hpp"
#include "rateq/rng.hpp"

namespace rateq {

/// Joint distribution of (J, X^n, Y^n, E^n) stored as one tensor with axes
/// j, x1..xn, y1..yn, e1..en. E axes of size 1 model the no-eavesdropper case.
struct MultiLetterJoint {
  int n = 0;
  JointDist joint;

  bool hasEve() const {
    for (int i = 0; i < n; ++i)
      if (joint.axes[static_cast<size_t>(1 + 2 * n + i)].size > 1) return true;
    return false;
  }
};

struct MultiLetterSizes {
  Eigen::Index j = 1, x = 2, y = 2, e = 1;
};

inline AxisVec multiLetterAxes(int n, const MultiLetterSizes& s) {
  AxisVec axes;
  axes.push_back({"j", s.j});
  for (int i = 1; i <= n; ++i) axes.push_back({"x" + std::to_string(i), s.x});
  for (int i = 1; i <= n; ++i) axes.push_back({"y" + std::to_string(i), s.y});
  for (int i = 1; i <= n; ++i) axes.push_back({"e" + std::to_string(i), s.e});
  return axes;
}

inline void checkStateGuard(const AxisVec& axes, std::int64_t guard) {
  if (stateCount(axes) > guard)
    throw Error("multi-letter state count " + std::to_string(stateCount(axes)) +
                " exceeds the guard of " + std::to_string(guard) +
                "; reduce n, the alphabet sizes, or raise the guard");
}

/// Dirichlet-like random joint, deterministic per seed.
inline MultiLetterJoint randomMultiLetter(int n, const MultiLetterSizes& sizes,
                                          std::uint64_t seed,
                                          std::int64_t guard = defaults::kStateGuard) {
  if (n < 1) throw Error("blocklength must be >= 1");
  AxisVec axes = multiLetterAxes(n, sizes);
  checkStateGuard(axes, guard);
  CounterRng rng(seed, kStreamMultiLetter);
  Eigen::VectorXd p = rng.randomPmf(stateCount(axes));
  return {n, makeJoint(std::move(axes), std::move(p))};
}

namespace detail {

inline NameVec xs(int n, int lo, int hi) {  // x_lo..x_hi inclusive, 1-based
  NameVec v;
  for (int i = lo; i <= hi; ++i) v.push_back("x" + std::to_string(i));
  return v;
}
inline NameVec ys(int n, int lo, int hi) {
  NameVec v;
  for (int i = lo; i <= hi; ++i) v.push_back("y" + std::to_string(i));
  return v;
}
inline NameVec es(int n, int lo, int hi) {
  NameVec v;
  for (int i = lo; i <= hi; ++i) v.push_back("e" + std::to_string(i));
  return v;
}

}  // namespace detail

/// |H(X^n|J) - H(Y^n|J) - sum_i [H(X_i|U_i) - H(Y_i|U_i)]| with
/// U_i = (X_{i+1}^n, Y^{i-1}, J). Zero (to rounding) for every joint.
inline double identity3Residual(const MultiLetterJoint& m,
                                std::int64_t guard = defaults::kStateGuard) {
  using namespace detail;
  checkStateGuard(m.joint.axes, guard);
  if (m.hasEve()) throw Error("identity3 requires the no-eavesdropper case (|E|=1)");
  const int n = m.n;
  const JointDist& d = m.joint;
  double lhs = condEntropyBits(d, xs(n, 1, n), {"j"}) - condEntropyBits(d, ys(n, 1, n), {"j"});
  KahanSum rhs;
  for (int i = 1; i <= n; ++i) {
    NameVec ui = unionNames(xs(n, i + 1, n), ys(n, 1, i - 1));
    ui.push_back("j");
    rhs.add(condEntropyBits(d, {"x" + std::to_string(i)}, ui) -
            condEntropyBits(d, {"y" + std::to_string(i)}, ui));
  }
  return std::abs(lhs - rhs.value());
}

/// |H(X^n|E^n,J) - H(Y^n|E^n,J) - sum_i [H(X_i|E_i,U_i) - H(Y_i|E_i,U_i)]|
/// with U_i = (X_{i+1}^n, Y^{i-1}, E^{-i}, J); E^{-i} drops position i.
inline double lemma1Residual(const MultiLetterJoint& m,
                             std::int64_t guard = defaults::kStateGuard) {
  using namespace detail;
  checkStateGuard(m.joint.axes, guard);
  const int n = m.n;
  const JointDist& d = m.joint;
  NameVec en = es(n, 1, n);
  NameVec enj = en;
  enj.push_back("j");
  double lhs =
      condEntropyBits(d, xs(n, 1, n), enj) - condEntropyBits(d, ys(n, 1, n), enj);
  KahanSum rhs;
  for (int i = 1; i <= n; ++i) {
    NameVec ui = unionNames(xs(n, i + 1, n), ys(n, 1, i - 1));
    for (int k = 1; k <= n; ++k)
      if (k != i) ui.push_back("e" + std::to_string(k));
    ui.push_back("j");
    NameVec cond = ui;
    cond.push_back("e" + std::to_string(i));
    rhs.add(condEntropyBits(d, {"x" + std::to_string(i)}, cond) -
            condEntropyBits(d, {"y" + std::to_string(i)}, cond));
  }
  return std::abs(lhs - rhs.value());
}

}  // namespace rateq
