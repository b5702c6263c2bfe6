#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

#include "rateq/axes.hpp"

namespace rateq {

/// max c·w  s.t.  Aeq w = beq,  Aub w <= bub,  w >= 0.
struct LpProblem {
  Eigen::MatrixXd a_eq;   // m_eq x n
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;   // m_ub x n (may be empty)
  Eigen::VectorXd b_ub;
  Eigen::VectorXd c;
};

struct LpSolution {
  enum class Status { kOptimal, kInfeasible, kIterationLimit };
  Status status = Status::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd w;  // structural variables only

  bool optimal() const { return status == Status::kOptimal; }
};

/// Dense two-phase primal simplex on the full tableau. Pricing is Dantzig
/// with lowest-index tie-breaks, falling back to Bland's rule after a run of
/// degenerate pivots so cycling cannot occur. Fully deterministic.
class SimplexSolver {
 public:
  explicit SimplexSolver(double tol = 1e-9) : tol_(tol) {}

  LpSolution solve(const LpProblem& prob) {
    const Eigen::Index n = prob.c.size();
    const Eigen::Index meq = prob.a_eq.rows();
    const Eigen::Index mub = prob.a_ub.rows();
    Eigen::Index m = meq + mub;

    // Columns: structural | slacks | artificials (one per row).
    const Eigen::Index nslack = mub;
    Eigen::Index ncols = n + nslack + m;
    Eigen::MatrixXd t(m, ncols);
    t.setZero();
    Eigen::VectorXd b(m);
    t.block(0, 0, meq, n) = prob.a_eq;
    b.head(meq) = prob.b_eq;
    if (mub > 0) {
      t.block(meq, 0, mub, n) = prob.a_ub;
      b.tail(mub) = prob.b_ub;
      for (Eigen::Index i = 0; i < mub; ++i) t(meq + i, n + i) = 1.0;
    }
    // Flip rows to make b nonnegative, then give every row an artificial.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (b[i] < 0) {
        t.row(i) = -t.row(i);
        b[i] = -b[i];
      }
      t(i, n + nslack + i) = 1.0;
    }
    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + nslack + i;

    const Eigen::Index artBegin = n + nslack;

    // Phase 1: minimize the artificial sum, i.e. maximize its negation.
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(ncols);
    c1.tail(m).setConstant(-1.0);
    if (!iterate(t, b, basis, c1, ncols)) return {LpSolution::Status::kIterationLimit, 0, {}};
    double art = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[i] >= artBegin) art += b[i];
    if (art > 1e-8) return {LpSolution::Status::kInfeasible, 0, {}};

    // Drive leftover zero-level artificials out of the basis; drop rows that
    // turn out redundant.
    std::vector<char> rowAlive(m, 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < artBegin) continue;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < artBegin; ++j) {
        if (std::abs(t(i, j)) > 1e-8) { enter = j; break; }
      }
      if (enter < 0) {
        rowAlive[i] = 0;
        continue;
      }
      pivot(t, b, basis, i, enter);
    }

    // Phase 2 on the real objective; artificial columns are frozen out.
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(ncols);
    c2.head(n) = prob.c;
    if (!iterate(t, b, basis, c2, artBegin, &rowAlive))
      return {LpSolution::Status::kIterationLimit, 0, {}};

    LpSolution sol;
    sol.status = LpSolution::Status::kOptimal;
    sol.w = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
      if (rowAlive[i] && basis[i] < n) sol.w[basis[i]] = std::max(0.0, b[i]);
    sol.value = prob.c.dot(sol.w);
    return sol;
  }

 private:
  double tol_;
  static constexpr std::int64_t kMaxIters = 200000;

  void pivot(Eigen::MatrixXd& t, Eigen::VectorXd& b, std::vector<Eigen::Index>& basis,
             Eigen::Index row, Eigen::Index col) {
    double piv = t(row, col);
    t.row(row) /= piv;
    b[row] /= piv;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i == row) continue;
      double f = t(i, col);
      if (f == 0.0) continue;
      t.row(i) -= f * t.row(row);
      b[i] -= f * b[row];
      if (b[i] < 0 && b[i] > -1e-11) b[i] = 0.0;
    }
    basis[row] = col;
  }

  bool iterate(Eigen::MatrixXd& t, Eigen::VectorXd& b, std::vector<Eigen::Index>& basis,
               const Eigen::VectorXd& c, Eigen::Index colLimit,
               const std::vector<char>* rowAlive = nullptr) {
    const Eigen::Index m = t.rows();
    Eigen::VectorXd cb(m);
    int degenerateRun = 0;
    double lastObj = -std::numeric_limits<double>::infinity();
    for (std::int64_t iter = 0; iter < kMaxIters; ++iter) {
      for (Eigen::Index i = 0; i < m; ++i) cb[i] = c[basis[i]];
      // Reduced costs over admissible columns.
      Eigen::Index enter = -1;
      double bestRc = tol_;
      const bool bland = degenerateRun > 100;
      for (Eigen::Index j = 0; j < colLimit; ++j) {
        double rc = c[j] - cb.dot(t.col(j));
        if (rc > (bland ? tol_ : bestRc)) {
          enter = j;
          bestRc = rc;
          if (bland) break;
        }
      }
      if (enter < 0) return true;  // optimal

      // Ratio test; ties resolved toward the smallest basis index.
      Eigen::Index leave = -1;
      double bestRatio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (rowAlive && !(*rowAlive)[i]) continue;
        double a = t(i, enter);
        if (a > 1e-10) {
          double ratio = b[i] / a;
          if (ratio < bestRatio - 1e-12 ||
              (ratio < bestRatio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
            bestRatio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) {
        // Unbounded direction; cannot happen for weights on a simplex, but
        // surface it as an iteration failure rather than looping.
        return false;
      }
      pivot(t, b, basis, leave, enter);
      double obj = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) obj += c[basis[i]] * b[i];
      if (obj > lastObj + 1e-13) {
        degenerateRun = 0;
        lastObj = obj;
      } else {
        ++degenerateRun;
      }
    }
    return false;
  }
};

}  // namespace rateq
