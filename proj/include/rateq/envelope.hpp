#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "rateq/axes.hpp"
#include "rateq/simplex.hpp"

namespace rateq {

/// Constrained upper-concave-envelope problem: pick weights w over posterior
/// atoms so that the weighted atoms average to `base`, the weighted score is
/// maximal, and each linear side constraint sum_g w_g coef_g <= bound holds.
struct EnvelopeProblem {
  Eigen::MatrixXd atoms;   // one atom per row, on the base simplex
  Eigen::VectorXd scores;  // per-atom objective f(g)
  Eigen::VectorXd base;
  std::vector<std::pair<Eigen::VectorXd, double>> constraints;  // (per-atom coef, ub)
};

struct EnvelopeSolution {
  bool feasible = false;
  double value = 0.0;
  std::vector<std::pair<Eigen::Index, double>> weights;  // sparse, basic solution
};

inline constexpr Eigen::Index kAtomCountGuard = 2'000'000;

/// All PMFs with denominator `resolution` on a k-cell simplex, lexicographic.
inline std::vector<Eigen::VectorXd> simplexGrid(Eigen::Index k, int resolution) {
  std::vector<Eigen::VectorXd> out;
  std::vector<int> cur(k);
  auto rec = [&](auto&& self, Eigen::Index cell, int remaining) -> void {
    if (cell == k - 1) {
      cur[cell] = remaining;
      Eigen::VectorXd v(k);
      for (Eigen::Index i = 0; i < k; ++i) v[i] = static_cast<double>(cur[i]) / resolution;
      out.push_back(std::move(v));
      return;
    }
    for (int t = remaining; t >= 0; --t) {
      cur[cell] = t;
      self(self, cell + 1, remaining - t);
    }
  };
  rec(rec, 0, resolution);
  return out;
}

/// Atom family for the auxiliary-variable LPs: the denominator-`resolution`
/// grid, the simplex vertices, the base itself, then caller-supplied extras
/// (conditional slices etc.). Extras are resolution independent, so grids
/// nest under doubling. Deduplicated keeping the first occurrence.
inline Eigen::MatrixXd buildAtoms(const Eigen::VectorXd& base, int resolution,
                                  const std::vector<Eigen::VectorXd>& extras = {}) {
  const Eigen::Index k = base.size();
  if (resolution < 1) throw Error("grid resolution must be >= 1");
  std::vector<Eigen::VectorXd> atoms = simplexGrid(k, resolution);
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    v[i] = 1.0;
    atoms.push_back(std::move(v));
  }
  atoms.push_back(base);
  for (const Eigen::VectorXd& e : extras) atoms.push_back(e);

  if (static_cast<Eigen::Index>(atoms.size()) > kAtomCountGuard)
    throw Error("atom grid too large; lower the grid resolution");

  std::vector<Eigen::VectorXd> uniq;
  uniq.reserve(atoms.size());
  std::vector<std::vector<std::int64_t>> keys;
  for (const Eigen::VectorXd& a : atoms) {
    std::vector<std::int64_t> key(k);
    for (Eigen::Index i = 0; i < k; ++i)
      key[i] = static_cast<std::int64_t>(std::llround(a[i] * 1e12));
    bool dup = false;
    for (const auto& seen : keys)
      if (seen == key) { dup = true; break; }
    if (!dup) {
      keys.push_back(std::move(key));
      uniq.push_back(a);
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(uniq.size()), k);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = uniq[i];
  return m;
}

/// Solves the envelope LP. A simplex basic solution has at most
/// (#barycenter rows + #side constraints) nonzero atoms, which is what keeps
/// witness supports within the cardinality bounds.
inline EnvelopeSolution solveEnvelope(const EnvelopeProblem& p) {
  const Eigen::Index n = p.atoms.rows();
  LpProblem lp;
  lp.a_eq = p.atoms.transpose();  // k x n barycenter rows (they imply sum w = 1)
  lp.b_eq = p.base;
  lp.c = p.scores;
  const Eigen::Index mub = static_cast<Eigen::Index>(p.constraints.size());
  lp.a_ub.resize(mub, n);
  lp.b_ub.resize(mub);
  for (Eigen::Index i = 0; i < mub; ++i) {
    if (p.constraints[i].first.size() != n)
      throw Error("envelope constraint length mismatch");
    lp.a_ub.row(i) = p.constraints[i].first;
    lp.b_ub[i] = p.constraints[i].second;
  }
  SimplexSolver solver;
  LpSolution sol = solver.solve(lp);
  EnvelopeSolution out;
  if (sol.status == LpSolution::Status::kIterationLimit)
    throw Error("envelope LP did not converge");
  if (!sol.optimal()) return out;
  out.feasible = true;
  out.value = sol.value;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sol.w[i] > 1e-12) out.weights.emplace_back(i, sol.w[i]);
  return out;
}

}  // namespace rateq
