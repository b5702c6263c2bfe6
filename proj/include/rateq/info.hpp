#pragma once

#include <cmath>

#include "rateq/dist.hpp"

namespace rateq {

/// Everything is in bits: log base 2, with the 0*log 0 = 0 convention
/// applied at the summation level.
inline double entropyBits(const Eigen::VectorXd& pmf) {
  KahanSum s;
  for (Eigen::Index i = 0; i < pmf.size(); ++i) {
    double p = pmf[i];
    if (p > 0.0) s.add(-p * std::log2(p));
  }
  return s.value();
}

inline double entropyBits(const JointDist& src, const NameVec& axes) {
  if (axes.empty()) throw Error("entropy: empty axis subset");
  return entropyBits(marginal(src, axes).p);
}

/// Mutual-information values in [-1e-10, 0) are numerical noise and clamp
/// to 0; anything more negative indicates an internal inconsistency.
inline double clampInfo(double v) {
  if (v >= 0.0) return v;
  if (v >= -1e-10) return 0.0;
  throw Error("information measure below numerical floor: " + std::to_string(v));
}

inline double condEntropyBits(const JointDist& src, const NameVec& target,
                              const NameVec& given) {
  if (!disjointNames(target, given)) throw Error("cond_entropy: overlapping subsets");
  if (given.empty()) return entropyBits(src, target);
  return entropyBits(src, unionNames(target, given)) - entropyBits(src, given);
}

inline double mutualInfoBits(const JointDist& src, const NameVec& a, const NameVec& b) {
  if (!disjointNames(a, b)) throw Error("mutual_info: overlapping subsets");
  return clampInfo(entropyBits(src, a) + entropyBits(src, b) -
                   entropyBits(src, unionNames(a, b)));
}

inline double condMutualInfoBits(const JointDist& src, const NameVec& a,
                                 const NameVec& b, const NameVec& given) {
  if (!disjointNames(a, b) || !disjointNames(a, given) || !disjointNames(b, given))
    throw Error("cond_mutual_info: overlapping subsets");
  if (given.empty()) return mutualInfoBits(src, a, b);
  double h_ag = entropyBits(src, unionNames(a, given));
  double h_bg = entropyBits(src, unionNames(b, given));
  double h_abg = entropyBits(src, unionNames(unionNames(a, b), given));
  double h_g = entropyBits(src, given);
  return clampInfo(h_ag + h_bg - h_abg - h_g);
}

}  // namespace rateq
