#pragma once

#include <Eigen/Dense>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rateq/axes.hpp"
#include "rateq/sum.hpp"

namespace rateq {

inline constexpr double kPmfTol = 1e-12;

/// Result of validating a PMF tensor: ok, or the first violated constraint
/// with its index and magnitude.
struct ValidationReport {
  bool ok = true;
  std::string message;
};

inline ValidationReport validatePmf(const Eigen::VectorXd& p, double tol = kPmfTol) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) {
      std::ostringstream os;
      os << "negativity at index " << i << ": " << p[i];
      return {false, os.str()};
    }
  }
  KahanSum s;
  for (Eigen::Index i = 0; i < p.size(); ++i) s.add(p[i]);
  double total = s.value();
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os << "sum deviates from 1 by " << (total - 1.0);
    return {false, os.str()};
  }
  return {};
}

/// Exact joint distribution over named finite axes, flat row-major storage.
/// Immutable by convention: every operation returns a new value.
struct JointDist {
  AxisVec axes;
  Eigen::VectorXd p;

  Eigen::Index axisSize(const std::string& name) const {
    return axes[findAxis(axes, name)].size;
  }
};

inline JointDist makeJoint(AxisVec axes, Eigen::VectorXd p) {
  if (stateCount(axes) != p.size()) throw Error("pmf length does not match axes");
  ValidationReport r = validatePmf(p);
  if (!r.ok) throw Error("invalid pmf: " + r.message);
  return JointDist{std::move(axes), std::move(p)};
}

/// Conditional PMF of one axis given an ordered tuple of input axes.
/// Rows whose conditioning event has zero mass are marked undefined; they
/// carry a uniform placeholder so the matrix stays stochastic.
struct Channel {
  AxisVec from;
  Axis to;
  Eigen::MatrixXd rows;            // (#from states) x to.size
  std::vector<char> row_defined;   // 1 = conditional is well defined

  Eigen::Index fromStates() const { return rows.rows(); }
};

inline Channel makeChannel(AxisVec from, Axis to, Eigen::MatrixXd rows,
                           std::vector<char> defined = {}) {
  if (stateCount(from) != rows.rows() || to.size != rows.cols())
    throw Error("channel shape does not match axes");
  if (defined.empty()) defined.assign(rows.rows(), 1);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (!defined[r]) continue;
    KahanSum s;
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (!(rows(r, c) >= 0.0)) throw Error("channel row has a negative entry");
      s.add(rows(r, c));
    }
    if (std::abs(s.value() - 1.0) > kPmfTol)
      throw Error("channel row does not sum to 1");
  }
  return Channel{std::move(from), std::move(to), std::move(rows), std::move(defined)};
}

/// Renormalizes rows whose sums are within `tol` of 1; rejects worse rows.
inline Eigen::MatrixXd normalizeRows(Eigen::MatrixXd m, double tol = 1e-9) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double s = m.row(r).sum();
    if (std::abs(s - 1.0) > tol) throw Error("channel row sum off by more than tolerance");
    m.row(r) /= s;
  }
  return m;
}

/// Sums out every axis not in `keep`; `keep` preserves the source axis order.
inline JointDist marginal(const JointDist& src, const NameVec& keep) {
  if (keep.empty()) throw Error("marginal: empty axis subset");
  std::vector<Eigen::Index> idx = axisIndices(src.axes, keep);
  // Reorder to the source's own order so results are canonical.
  std::sort(idx.begin(), idx.end());
  AxisVec outAxes;
  for (Eigen::Index i : idx) outAxes.push_back(src.axes[i]);
  std::vector<Eigen::Index> outStrides = rowMajorStrides(outAxes);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(stateCount(outAxes));
  std::vector<Eigen::Index> coords;
  const Eigen::Index n = src.p.size();
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    unravel(flat, src.axes, coords);
    Eigen::Index o = 0;
    for (size_t k = 0; k < idx.size(); ++k) o += coords[idx[k]] * outStrides[k];
    out[o] += src.p[flat];
  }
  return JointDist{std::move(outAxes), std::move(out)};
}

/// P(target | given) as a Channel. Zero-mass conditioning rows get the
/// undefined marker instead of a crash.
inline Channel conditionOn(const JointDist& src, const std::string& target,
                           const NameVec& given) {
  NameVec keep = given;
  keep.push_back(target);
  JointDist joint = marginal(src, keep);      // axes in src order
  JointDist giv = marginal(src, given);

  // Build rows indexed row-major over `given` in the caller's order.
  AxisVec fromAxes;
  for (const std::string& g : given) fromAxes.push_back(src.axes[findAxis(src.axes, g)]);
  Axis toAxis = src.axes[findAxis(src.axes, target)];

  Eigen::MatrixXd rows(stateCount(fromAxes), toAxis.size);
  std::vector<char> defined(rows.rows(), 1);

  std::vector<Eigen::Index> jointStrides = rowMajorStrides(joint.axes);
  std::vector<Eigen::Index> givStrides = rowMajorStrides(giv.axes);
  std::vector<Eigen::Index> coords;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    unravel(r, fromAxes, coords);
    // Map the caller-order coords onto the canonical marginals.
    Eigen::Index gFlat = 0;
    for (size_t k = 0; k < given.size(); ++k)
      gFlat += coords[k] * givStrides[findAxis(giv.axes, given[k])];
    double pg = giv.p[gFlat];
    if (pg <= 0.0) {
      defined[r] = 0;
      rows.row(r).setConstant(1.0 / static_cast<double>(toAxis.size));
      continue;
    }
    for (Eigen::Index t = 0; t < toAxis.size; ++t) {
      Eigen::Index jFlat = t * jointStrides[findAxis(joint.axes, target)];
      for (size_t k = 0; k < given.size(); ++k)
        jFlat += coords[k] * jointStrides[findAxis(joint.axes, given[k])];
      rows(r, t) = joint.p[jFlat] / pg;
    }
  }
  return Channel{std::move(fromAxes), toAxis, std::move(rows), std::move(defined)};
}

/// P(x,y,z) * P(e|y) -> joint over (x,y,z,e). The eavesdropper observation
/// depends on the public source alone.
inline JointDist composeMarkov(const JointDist& pxyz, const Channel& eGivenY) {
  if (pxyz.axes.size() != 3 || pxyz.axes[0].name != "x" || pxyz.axes[1].name != "y" ||
      pxyz.axes[2].name != "z")
    throw Error("composeMarkov expects axes (x,y,z)");
  if (eGivenY.from.size() != 1 || eGivenY.from[0].name != "y" ||
      eGivenY.from[0].size != pxyz.axes[1].size)
    throw Error("composeMarkov: channel must condition on y with matching size");

  AxisVec axes = pxyz.axes;
  axes.push_back(eGivenY.to);
  Eigen::VectorXd out(stateCount(axes));
  const Eigen::Index ne = eGivenY.to.size;
  std::vector<Eigen::Index> coords;
  for (Eigen::Index flat = 0; flat < pxyz.p.size(); ++flat) {
    unravel(flat, pxyz.axes, coords);
    for (Eigen::Index e = 0; e < ne; ++e)
      out[flat * ne + e] = pxyz.p[flat] * eGivenY.rows(coords[1], e);
  }
  return makeJoint(std::move(axes), std::move(out));
}

/// Extends a joint by one auxiliary axis drawn through `aux`. Legal inputs:
/// u conditioned on a subset of {x,y}; v conditioned on {z}.
inline JointDist attachAux(const JointDist& src, const Channel& aux,
                           const std::string& auxName) {
  if (hasAxis(src.axes, auxName)) throw Error("axis '" + auxName + "' already present");
  if (auxName == "u") {
    for (const Axis& a : aux.from)
      if (a.name != "x" && a.name != "y")
        throw Error("u may only be conditioned on x and/or y, got '" + a.name + "'");
  } else if (auxName == "v") {
    if (aux.from.size() != 1 || aux.from[0].name != "z")
      throw Error("v must be conditioned on z alone");
  } else {
    throw Error("auxiliary axis must be named u or v");
  }
  if (aux.from.empty()) throw Error("auxiliary channel needs at least one input axis");

  std::vector<Eigen::Index> fromIdx;
  for (const Axis& a : aux.from) {
    Eigen::Index i = findAxis(src.axes, a.name);
    if (src.axes[i].size != a.size) throw Error("axis size mismatch for '" + a.name + "'");
    fromIdx.push_back(i);
  }
  std::vector<Eigen::Index> fromStrides = rowMajorStrides(aux.from);

  AxisVec axes = src.axes;
  axes.push_back(Axis{auxName, aux.to.size});
  Eigen::VectorXd out(stateCount(axes));
  const Eigen::Index nu = aux.to.size;
  std::vector<Eigen::Index> coords;
  for (Eigen::Index flat = 0; flat < src.p.size(); ++flat) {
    unravel(flat, src.axes, coords);
    Eigen::Index r = 0;
    for (size_t k = 0; k < fromIdx.size(); ++k) r += coords[fromIdx[k]] * fromStrides[k];
    for (Eigen::Index u = 0; u < nu; ++u) out[flat * nu + u] = src.p[flat] * aux.rows(r, u);
  }
  return makeJoint(std::move(axes), std::move(out));
}

/// Largest deviation of P(target | everything else) from P(target | cond),
/// over states of positive conditioning mass. Zero (to rounding) iff the
/// chain (rest) -> cond -> target holds.
inline double markovResidual(const JointDist& joint, const std::string& target,
                             const NameVec& cond) {
  NameVec rest;
  for (const Axis& a : joint.axes)
    if (a.name != target) rest.push_back(a.name);
  Channel full = conditionOn(joint, target, rest);
  Channel part = conditionOn(joint, target, cond);
  // Compare row-by-row through the rest-state coordinates.
  AxisVec restAxes;
  for (const std::string& nm : rest) restAxes.push_back(joint.axes[findAxis(joint.axes, nm)]);
  std::vector<Eigen::Index> condPos;
  for (const std::string& c : cond) {
    auto it = std::find(rest.begin(), rest.end(), c);
    if (it == rest.end()) throw Error("markovResidual: cond axis missing");
    condPos.push_back(static_cast<Eigen::Index>(it - rest.begin()));
  }
  AxisVec condAxes;
  for (const std::string& c : cond) condAxes.push_back(joint.axes[findAxis(joint.axes, c)]);
  std::vector<Eigen::Index> condStrides = rowMajorStrides(condAxes);

  double worst = 0.0;
  std::vector<Eigen::Index> coords;
  for (Eigen::Index r = 0; r < full.fromStates(); ++r) {
    if (!full.row_defined[r]) continue;
    unravel(r, restAxes, coords);
    Eigen::Index cFlat = 0;
    for (size_t k = 0; k < condPos.size(); ++k) cFlat += coords[condPos[k]] * condStrides[k];
    if (!part.row_defined[cFlat]) continue;
    worst = std::max(worst, (full.rows.row(r) - part.rows.row(cFlat)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace rateq
