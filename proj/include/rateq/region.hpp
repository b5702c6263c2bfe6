#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rateq/defaults.hpp"
#include "rateq/dist.hpp"
#include "rateq/envelope.hpp"
#include "rateq/info.hpp"
#include "rateq/parallel.hpp"

namespace rateq {

/// Which single-letter bound is being evaluated. THM1/THM2 condition the
/// auxiliary U on (X,Y); COR1/THM3 condition it on Y alone. THM3 and the
/// Slepian-Wolf baseline assume uncoded decoder side information.
enum class Mode { kThm1, kCor1, kThm2, kThm3, kSwBaseline };

inline const char* modeName(Mode m) {
  switch (m) {
    case Mode::kThm1: return "THM1";
    case Mode::kCor1: return "COR1";
    case Mode::kThm2: return "THM2";
    case Mode::kThm3: return "THM3";
    case Mode::kSwBaseline: return "SW_BASELINE";
  }
  return "?";
}

inline Mode parseMode(const std::string& s) {
  if (s == "THM1" || s == "thm1") return Mode::kThm1;
  if (s == "COR1" || s == "cor1") return Mode::kCor1;
  if (s == "THM2" || s == "thm2") return Mode::kThm2;
  if (s == "THM3" || s == "thm3") return Mode::kThm3;
  if (s == "SW_BASELINE" || s == "sw" || s == "sw_baseline") return Mode::kSwBaseline;
  throw Error("unknown mode '" + s + "'");
}

inline bool uConditionsOnYOnly(Mode m) { return m == Mode::kCor1 || m == Mode::kThm3; }

inline void requireSourceAxes(const JointDist& src) {
  static const char* names[] = {"x", "y", "z", "e"};
  if (src.axes.size() != 4) throw Error("source must have axes (x,y,z,e)");
  for (int i = 0; i < 4; ++i)
    if (src.axes[i].name != names[i]) throw Error("source axes must be ordered x,y,z,e");
}

/// U-dependent part of the equivocation bound, evaluated on a joint that
/// already carries the auxiliary axis.
inline double uGain(const JointDist& joint, Mode mode, bool checkStructure = true) {
  if (!hasAxis(joint.axes, "u")) throw Error("u_gain: no u axis attached");
  if (mode == Mode::kSwBaseline) throw Error("u_gain: baseline mode has no auxiliary");
  if (checkStructure) {
    NameVec cond = uConditionsOnYOnly(mode) ? NameVec{"y"} : NameVec{"x", "y"};
    if (markovResidual(joint, "u", cond) > 1e-9)
      throw Error("u_gain: auxiliary does not satisfy the required Markov chain");
  }
  switch (mode) {
    case Mode::kThm1:
    case Mode::kCor1:
      return condEntropyBits(joint, {"x"}, {"u"}) - condEntropyBits(joint, {"y"}, {"u"});
    case Mode::kThm2:
      return -condMutualInfoBits(joint, {"x", "y"}, {"e"}, {"u"}) +
             condEntropyBits(joint, {"x"}, {"e", "u"}) -
             condEntropyBits(joint, {"y"}, {"e", "u"});
    case Mode::kThm3:
      return condMutualInfoBits(joint, {"y"}, {"z"}, {"u"}) -
             condMutualInfoBits(joint, {"y"}, {"e"}, {"u"}) +
             condEntropyBits(joint, {"x"}, {"e", "u"}) -
             condEntropyBits(joint, {"y"}, {"e", "u"});
    default:
      break;
  }
  throw Error("u_gain: unhandled mode");
}

struct VTradeoff {
  double h_y_given_v = 0;
  double i_z_v = 0;
  double i_xy_v = 0;
};

/// The three V-side quantities R_A >= H(Y|V), R_C >= I(Z;V), delta <= I(X,Y;V)+...
inline VTradeoff vTradeoff(const JointDist& joint, bool checkStructure = true) {
  if (!hasAxis(joint.axes, "v")) throw Error("v_tradeoff: no v axis attached");
  if (checkStructure && markovResidual(joint, "v", {"z"}) > 1e-9)
    throw Error("v_tradeoff: v must be conditioned on z alone");
  VTradeoff t;
  t.h_y_given_v = condEntropyBits(joint, {"y"}, {"v"});
  t.i_z_v = mutualInfoBits(joint, {"z"}, {"v"});
  t.i_xy_v = mutualInfoBits(joint, {"x", "y"}, {"v"});
  return t;
}

struct SwEquivocation {
  double raw = 0;
  double clamped = 0;
};

/// Slepian-Wolf baseline H(X|E) - H(Y|Z), raw and clamped at zero.
inline SwEquivocation swEquivocation(const JointDist& src) {
  requireSourceAxes(src);
  double raw = condEntropyBits(src, {"x"}, {"e"}) - condEntropyBits(src, {"y"}, {"z"});
  return {raw, std::max(0.0, raw)};
}

// ---------------------------------------------------------------------------
// Per-posterior scoring for the auxiliary-variable LPs.
// ---------------------------------------------------------------------------

/// Support cells and regeneration kernels for the U optimization. Atoms are
/// posteriors over the support of P(x,y) (THM1/THM2) or of P(y) (COR1/THM3);
/// the remaining coordinates are regenerated through the source conditionals,
/// so cells of zero source mass never need a conditional (they cannot carry
/// weight under the barycenter constraint).
struct UAtomSpace {
  Mode mode;
  Eigen::Index nx = 0, ny = 0, nz = 0, ne = 0;
  std::vector<Eigen::Index> cells;  // flat (x*ny+y) for pair modes, y otherwise
  Eigen::VectorXd base;
  Eigen::MatrixXd eGivenY;    // (y, e)      THM2
  Eigen::MatrixXd xGivenY;    // (y, x)      COR1
  Eigen::MatrixXd zGivenY;    // (y, z)      THM3
  Eigen::MatrixXd xeGivenY;   // (y, x*e)    THM3
  bool pairMode() const { return !uConditionsOnYOnly(mode); }

  double score(const Eigen::VectorXd& q) const {
    if (pairMode()) {
      Eigen::VectorXd qx = Eigen::VectorXd::Zero(nx), qy = Eigen::VectorXd::Zero(ny);
      for (size_t i = 0; i < cells.size(); ++i) {
        Eigen::Index x = cells[i] / ny, y = cells[i] % ny;
        qx[x] += q[i];
        qy[y] += q[i];
      }
      if (mode == Mode::kThm1) return entropyBits(qx) - entropyBits(qy);
      // THM2: regenerate E from the fixed P(e|y).
      Eigen::VectorXd pe = Eigen::VectorXd::Zero(ne);
      Eigen::VectorXd pxe = Eigen::VectorXd::Zero(nx * ne);
      Eigen::VectorXd pye = Eigen::VectorXd::Zero(ny * ne);
      KahanSum hxye;
      for (size_t i = 0; i < cells.size(); ++i) {
        if (q[i] <= 0) continue;
        Eigen::Index x = cells[i] / ny, y = cells[i] % ny;
        for (Eigen::Index e = 0; e < ne; ++e) {
          double m = q[i] * eGivenY(y, e);
          pe[e] += m;
          pxe[x * ne + e] += m;
          pye[y * ne + e] += m;
          if (m > 0) hxye.add(-m * std::log2(m));
        }
      }
      // H(X|E) - H(Y|E) - I(X,Y;E) rearranged into plain joint entropies.
      return entropyBits(pxe) - entropyBits(pye) - entropyBits(qFull(q)) -
             entropyBits(pe) + hxye.value();
    }
    if (mode == Mode::kCor1) {
      Eigen::VectorXd px = Eigen::VectorXd::Zero(nx);
      for (size_t i = 0; i < cells.size(); ++i)
        px += q[i] * xGivenY.row(cells[i]).transpose();
      return entropyBits(px) - entropyBits(q);
    }
    // THM3: regenerate (X,Z,E) from the fixed P(x,z,e|y); the score reduces
    // to H(Z) - H(Y,Z) - H(E) + H(X,E) of the regenerated joint.
    Eigen::VectorXd pz = Eigen::VectorXd::Zero(nz);
    Eigen::VectorXd pxe = Eigen::VectorXd::Zero(nx * ne);
    Eigen::VectorXd pe = Eigen::VectorXd::Zero(ne);
    KahanSum hyz;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (q[i] <= 0) continue;
      Eigen::Index y = cells[i];
      for (Eigen::Index z = 0; z < nz; ++z) {
        double m = q[i] * zGivenY(y, z);
        pz[z] += m;
        if (m > 0) hyz.add(-m * std::log2(m));
      }
      pxe += q[i] * xeGivenY.row(y).transpose();
    }
    for (Eigen::Index x = 0; x < nx; ++x)
      for (Eigen::Index e = 0; e < ne; ++e) pe[e] += pxe[x * ne + e];
    return entropyBits(pz) - hyz.value() - entropyBits(pe) + entropyBits(pxe);
  }

 private:
  // Entropy of the atom seen as a joint over its cells (cells are distinct).
  Eigen::VectorXd qFull(const Eigen::VectorXd& q) const { return q; }
};

inline UAtomSpace buildUSpace(const JointDist& src, Mode mode) {
  requireSourceAxes(src);
  UAtomSpace s;
  s.mode = mode;
  s.nx = src.axes[0].size;
  s.ny = src.axes[1].size;
  s.nz = src.axes[2].size;
  s.ne = src.axes[3].size;
  if (s.pairMode()) {
    JointDist pxy = marginal(src, {"x", "y"});
    for (Eigen::Index i = 0; i < pxy.p.size(); ++i)
      if (pxy.p[i] > 0) s.cells.push_back(i);
    s.base.resize(static_cast<Eigen::Index>(s.cells.size()));
    for (size_t i = 0; i < s.cells.size(); ++i) s.base[i] = pxy.p[s.cells[i]];
    if (mode == Mode::kThm2) s.eGivenY = conditionOn(src, "e", {"y"}).rows;
  } else {
    JointDist py = marginal(src, {"y"});
    for (Eigen::Index y = 0; y < py.p.size(); ++y)
      if (py.p[y] > 0) s.cells.push_back(y);
    s.base.resize(static_cast<Eigen::Index>(s.cells.size()));
    for (size_t i = 0; i < s.cells.size(); ++i) s.base[i] = py.p[s.cells[i]];
    if (mode == Mode::kCor1) {
      s.xGivenY = conditionOn(src, "x", {"y"}).rows;
    } else {
      s.zGivenY = conditionOn(src, "z", {"y"}).rows;
      s.eGivenY = conditionOn(src, "e", {"y"}).rows;
      // P(x,e|y): x and e need not be independent given y for general sources.
      JointDist pxye = marginal(src, {"x", "y", "e"});
      s.xeGivenY = Eigen::MatrixXd::Zero(s.ny, s.nx * s.ne);
      for (Eigen::Index x = 0; x < s.nx; ++x)
        for (Eigen::Index y = 0; y < s.ny; ++y)
          for (Eigen::Index e = 0; e < s.ne; ++e)
            if (py.p[y] > 0)
              s.xeGivenY(y, x * s.ne + e) =
                  pxye.p[(x * s.ny + y) * s.ne + e] / py.p[y];
    }
  }
  return s;
}

/// Resolution-independent extra atoms: restrictions of the base to support
/// subsets (posteriors of deterministic auxiliaries) and conditional slices
/// through the other source coordinates. They pin down optima that sit off
/// every denominator grid, e.g. P(x|y=y0).
inline std::vector<Eigen::VectorXd> uExtraAtoms(const JointDist& src, const UAtomSpace& s) {
  std::vector<Eigen::VectorXd> extras;
  const Eigen::Index k = s.base.size();
  if (k <= 10) {
    for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(k);
      double tot = 0;
      for (Eigen::Index i = 0; i < k; ++i)
        if (mask & (1u << i)) {
          a[i] = s.base[i];
          tot += s.base[i];
        }
      if (tot > 0) extras.push_back(a / tot);
    }
  }
  // Conditional slices P(cells | axis=symbol).
  NameVec cellAxes = s.pairMode() ? NameVec{"x", "y"} : NameVec{"y"};
  NameVec others;
  for (const Axis& a : src.axes)
    if (std::find(cellAxes.begin(), cellAxes.end(), a.name) == cellAxes.end())
      others.push_back(a.name);
  for (const std::string& other : others) {
    NameVec keep = cellAxes;
    keep.push_back(other);
    JointDist m = marginal(src, keep);  // axes in source order
    Eigen::Index otherIdx = findAxis(m.axes, other);
    Eigen::Index otherSize = m.axes[otherIdx].size;
    std::vector<Eigen::Index> strides = rowMajorStrides(m.axes);
    AxisVec cellAxesV;
    for (const std::string& nm : cellAxes) cellAxesV.push_back(src.axes[findAxis(src.axes, nm)]);
    for (Eigen::Index sym = 0; sym < otherSize; ++sym) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(k);
      double tot = 0;
      std::vector<Eigen::Index> coords;
      for (size_t ci = 0; ci < s.cells.size(); ++ci) {
        unravel(s.cells[ci], cellAxesV, coords);
        Eigen::Index flat = sym * strides[otherIdx];
        for (size_t k2 = 0; k2 < cellAxes.size(); ++k2)
          flat += coords[k2] * strides[findAxis(m.axes, cellAxes[k2])];
        a[static_cast<Eigen::Index>(ci)] = m.p[flat];
        tot += m.p[flat];
      }
      if (tot > 0) extras.push_back(a / tot);
    }
  }
  return extras;
}

struct OptimizeUResult {
  double value = 0;
  Channel witness;
};

/// Maximizes the mode's U-part over admissible P(u|.) as an exact LP over
/// posterior atoms; the simplex basic solution keeps the witness support
/// within the cardinality bounds.
inline OptimizeUResult optimizeU(const JointDist& src, Mode mode, int resolution = -1) {
  UAtomSpace space = buildUSpace(src, mode);
  if (resolution < 1) resolution = defaults::gridResolution(space.base.size());
  EnvelopeProblem prob;
  prob.atoms = buildAtoms(space.base, resolution, uExtraAtoms(src, space));
  prob.base = space.base;
  prob.scores.resize(prob.atoms.rows());
  for (Eigen::Index i = 0; i < prob.atoms.rows(); ++i)
    prob.scores[i] = space.score(prob.atoms.row(i).transpose());
  EnvelopeSolution sol = solveEnvelope(prob);
  if (!sol.feasible) throw Error("optimize_u: envelope LP infeasible");  // cannot happen

  // Witness rows over the full input alphabet; off-support inputs draw U
  // from the mixture weights.
  const Eigen::Index nu = static_cast<Eigen::Index>(sol.weights.size());
  const Eigen::Index nin = space.pairMode() ? space.nx * space.ny : space.ny;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(nin, nu);
  double wtot = 0;
  for (const auto& [ai, w] : sol.weights) wtot += w;
  for (Eigen::Index r = 0; r < nin; ++r)
    for (Eigen::Index u = 0; u < nu; ++u) rows(r, u) = sol.weights[u].second / wtot;
  for (size_t ci = 0; ci < space.cells.size(); ++ci) {
    Eigen::Index r = space.cells[ci];
    for (Eigen::Index u = 0; u < nu; ++u)
      rows(r, u) = sol.weights[u].second *
                   prob.atoms(sol.weights[u].first, static_cast<Eigen::Index>(ci)) /
                   space.base[static_cast<Eigen::Index>(ci)];
  }
  AxisVec from = space.pairMode()
                     ? AxisVec{{"x", space.nx}, {"y", space.ny}}
                     : AxisVec{{"y", space.ny}};
  Channel witness = makeChannel(from, Axis{"u", nu}, normalizeRows(rows, 1e-6));
  return {sol.value, std::move(witness)};
}

// ---------------------------------------------------------------------------
// V side.
// ---------------------------------------------------------------------------

enum class VObjective { kIxyV, kIyV };

struct OptimizeVResult {
  bool feasible = false;
  double value = 0;               // max of the chosen objective
  double h_y_given_v = 0;         // of the witness
  double i_z_v = 0;               // of the witness
  Channel witness;
};

/// Maximizes I(X,Y;V) (or I(Y;V)) over P(v|z) subject to I(Z;V) <= rc and,
/// when given, H(Y|V) <= ra. Both constraints are linear in the atom weights
/// so they ride on the same LP.
inline OptimizeVResult optimizeV(const JointDist& src, double rcBudget, int resolution = -1,
                                 std::optional<double> raBudget = std::nullopt,
                                 VObjective objective = VObjective::kIxyV) {
  requireSourceAxes(src);
  const Eigen::Index nx = src.axes[0].size, ny = src.axes[1].size, nz = src.axes[2].size;
  JointDist pz = marginal(src, {"z"});
  std::vector<Eigen::Index> cells;
  for (Eigen::Index z = 0; z < nz; ++z)
    if (pz.p[z] > 0) cells.push_back(z);
  const Eigen::Index k = static_cast<Eigen::Index>(cells.size());
  Eigen::VectorXd base(k);
  for (Eigen::Index i = 0; i < k; ++i) base[i] = pz.p[cells[i]];
  if (resolution < 1) resolution = defaults::gridResolution(k);

  JointDist pxyz = marginal(src, {"x", "y", "z"});
  Eigen::MatrixXd xyGivenZ(k, nx * ny), yGivenZ(k, ny);
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index z = cells[i];
    for (Eigen::Index x = 0; x < nx; ++x)
      for (Eigen::Index y = 0; y < ny; ++y)
        xyGivenZ(i, x * ny + y) = pxyz.p[(x * ny + y) * nz + z] / base[i];
    for (Eigen::Index y = 0; y < ny; ++y) {
      double s = 0;
      for (Eigen::Index x = 0; x < nx; ++x) s += xyGivenZ(i, x * ny + y);
      yGivenZ(i, y) = s;
    }
  }
  double hxy = entropyBits(src, {"x", "y"});
  double hy = entropyBits(src, {"y"});
  double hz = entropyBits(base);

  EnvelopeProblem prob;
  prob.atoms = buildAtoms(base, resolution);
  prob.base = base;
  const Eigen::Index n = prob.atoms.rows();
  prob.scores.resize(n);
  Eigen::VectorXd hzAtom(n), hyAtom(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd g = prob.atoms.row(i).transpose();
    hzAtom[i] = entropyBits(g);
    hyAtom[i] = entropyBits(Eigen::VectorXd(yGivenZ.transpose() * g));
    prob.scores[i] = objective == VObjective::kIxyV
                         ? hxy - entropyBits(Eigen::VectorXd(xyGivenZ.transpose() * g))
                         : hy - hyAtom[i];
  }
  // I(Z;V) = H(Z) - sum_g w_g H(g) <= rc.
  prob.constraints.emplace_back(-hzAtom, rcBudget - hz);
  if (raBudget) prob.constraints.emplace_back(hyAtom, *raBudget);

  EnvelopeSolution sol = solveEnvelope(prob);
  OptimizeVResult out;
  if (!sol.feasible) return out;
  out.feasible = true;
  out.value = sol.value;
  const Eigen::Index nv = static_cast<Eigen::Index>(sol.weights.size());
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(nz, nv);
  double wtot = 0;
  for (const auto& [ai, w] : sol.weights) wtot += w;
  for (Eigen::Index z = 0; z < nz; ++z)
    for (Eigen::Index v = 0; v < nv; ++v) rows(z, v) = sol.weights[v].second / wtot;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index v = 0; v < nv; ++v)
      rows(cells[i], v) = sol.weights[v].second * prob.atoms(sol.weights[v].first, i) / base[i];
  out.witness = makeChannel({{"z", nz}}, Axis{"v", nv}, normalizeRows(rows, 1e-6));
  for (const auto& [ai, w] : sol.weights) {
    out.h_y_given_v += w * hyAtom[ai];
    out.i_z_v += w * hzAtom[ai];
  }
  out.i_z_v = std::max(0.0, hz - out.i_z_v);
  return out;
}

// ---------------------------------------------------------------------------
// Frontier assembly.
// ---------------------------------------------------------------------------

struct RegionPoint {
  Mode mode = Mode::kThm1;
  double r_a = 0;
  double r_c = 0;
  bool feasible = false;
  double delta_raw = std::numeric_limits<double>::quiet_NaN();
  double delta_clamped = std::numeric_limits<double>::quiet_NaN();
  std::optional<Channel> u_witness;
  std::optional<Channel> v_witness;
};

struct FrontierOptions {
  int resolution = -1;   // grid denominator for both LPs (-1 = defaults table)
  int jobs = 1;
  bool keep_witnesses = false;
  bool time_share = false;
};

/// Evaluates the mode's equivocation bound over a budget grid. The U part is
/// budget independent and solved once; the V part is one LP per point with
/// the R_C and R_A rows attached. Delta is clamped to [0, H(X)] and both raw
/// and clamped values are kept.
inline std::vector<RegionPoint> regionFrontier(const JointDist& src, Mode mode,
                                               const std::vector<std::pair<double, double>>& budgets,
                                               FrontierOptions opts = {}) {
  requireSourceAxes(src);
  const double hx = entropyBits(src, {"x"});
  const double hz = entropyBits(src, {"z"});
  const double hyz = condEntropyBits(src, {"y"}, {"z"});

  std::optional<OptimizeUResult> uPart;
  std::optional<SwEquivocation> sw;
  if (mode == Mode::kSwBaseline)
    sw = swEquivocation(src);
  else
    uPart = optimizeU(src, mode, opts.resolution);

  std::vector<RegionPoint> points(budgets.size());
  parallelFor(budgets.size(), opts.jobs, [&](std::size_t i) {
    RegionPoint& pt = points[i];
    pt.mode = mode;
    pt.r_a = budgets[i].first;
    pt.r_c = budgets[i].second;
    if (mode == Mode::kThm3 || mode == Mode::kSwBaseline) {
      // Uncoded side information: R_C >= H(Z), R_A >= H(Y|Z).
      if (pt.r_a < hyz - 1e-9 || pt.r_c < hz - 1e-9) return;
      pt.feasible = true;
      pt.delta_raw = mode == Mode::kThm3 ? uPart->value : sw->raw;
    } else {
      VObjective obj = mode == Mode::kCor1 ? VObjective::kIyV : VObjective::kIxyV;
      OptimizeVResult v = optimizeV(src, pt.r_c, opts.resolution, pt.r_a, obj);
      if (!v.feasible) return;
      pt.feasible = true;
      pt.delta_raw = v.value + uPart->value;
      if (opts.keep_witnesses) pt.v_witness = std::move(v.witness);
    }
    pt.delta_clamped = std::min(std::max(pt.delta_raw, 0.0), hx);
    if (opts.keep_witnesses && uPart) pt.u_witness = uPart->witness;
  });

  if (opts.time_share) {
    // Optional convexification: a point may time-share any two others whose
    // average budgets fit inside its own.
    std::vector<RegionPoint> base = points;
    for (RegionPoint& pt : points) {
      if (!pt.feasible) continue;
      for (const RegionPoint& a : base) {
        if (!a.feasible) continue;
        for (const RegionPoint& b : base) {
          if (!b.feasible) continue;
          for (int li = 0; li <= 20; ++li) {
            double lam = li / 20.0;
            if (lam * a.r_a + (1 - lam) * b.r_a <= pt.r_a + 1e-12 &&
                lam * a.r_c + (1 - lam) * b.r_c <= pt.r_c + 1e-12) {
              double d = lam * a.delta_clamped + (1 - lam) * b.delta_clamped;
              if (d > pt.delta_clamped) {
                pt.delta_clamped = d;
                pt.delta_raw = std::max(pt.delta_raw, d);
              }
            }
          }
        }
      }
    }
  }
  return points;
}

}  // namespace rateq
