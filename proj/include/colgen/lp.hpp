// Copyright 2026 The colgen Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense two-phase simplex for the restricted master problems.
//
// Problem form:
//   min  c'x
//   s.t. A x <= b
//        x >= 0
//
// Duals are reported as lambda >= 0 with the sign convention
//   c + A'lambda >= 0,   dual objective = -b'lambda,
// which is the form the pricing oracles consume directly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colgen/error.hpp"

namespace colgen {

struct LinearProgram {
  int num_rows = 0;
  std::vector<double> costs;
  // Sparse column-major constraint matrix: (row, coefficient) per variable.
  std::vector<std::vector<std::pair<int, double>>> columns;
  std::vector<double> rhs;

  int num_vars() const { return static_cast<int>(costs.size()); }

  int add_row(double row_rhs) {
    rhs.push_back(row_rhs);
    return num_rows++;
  }

  int add_column(double cost, std::vector<std::pair<int, double>> entries) {
    costs.push_back(cost);
    columns.push_back(std::move(entries));
    return num_vars() - 1;
  }

  void validate() const {
    if (static_cast<int>(rhs.size()) != num_rows) {
      throw Error(ErrorCode::kDimensionMismatch, "rhs size != num_rows");
    }
    if (columns.size() != costs.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "columns size != costs size");
    }
    for (double b : rhs) {
      if (!std::isfinite(b)) {
        throw Error(ErrorCode::kDimensionMismatch, "non-finite rhs");
      }
    }
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (!std::isfinite(costs[j])) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "non-finite cost on variable " + std::to_string(j));
      }
      for (const auto& [row, coef] : columns[j]) {
        if (row < 0 || row >= num_rows || !std::isfinite(coef)) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "bad entry in column " + std::to_string(j));
        }
      }
    }
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  std::vector<double> primal;
  std::vector<double> duals;
  double objective = 0.0;

  // Post-solve certificates, filled on optimal status.
  double dual_objective = 0.0;
  double max_primal_residual = 0.0;
  double max_complementarity = 0.0;
  double min_reduced_cost = 0.0;
  int pivots = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
  double duality_gap() const { return std::abs(objective - dual_objective); }
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  // Entering threshold used inside the pivot loop; tighter than the reported
  // optimality tolerance so the certificate checks have headroom.
  double pricing_tol = 1e-10;
  double pivot_tol = 1e-9;
  double breakdown_tol = 1e-11;
  int bland_after_degenerate = 200;
  int max_pivots = 0;  // 0 = automatic
};

inline std::vector<double> row_activity(const LinearProgram& lp,
                                        std::span<const double> x) {
  std::vector<double> act(lp.num_rows, 0.0);
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (x[j] == 0.0) continue;
    for (const auto& [row, coef] : lp.columns[j]) act[row] += coef * x[j];
  }
  return act;
}

namespace internal {

// Dense LU with partial pivoting; solves M y = r in place (or M' y = r).
class DenseLu {
 public:
  DenseLu(std::vector<double> m, int n, double breakdown_tol)
      : n_(n), lu_(std::move(m)), perm_(n) {
    for (int i = 0; i < n_; ++i) perm_[i] = i;
    for (int k = 0; k < n_; ++k) {
      int p = k;
      double best = std::abs(at(k, k));
      for (int i = k + 1; i < n_; ++i) {
        if (std::abs(at(i, k)) > best) {
          best = std::abs(at(i, k));
          p = i;
        }
      }
      if (best < breakdown_tol) {
        throw Error(ErrorCode::kNumericalBreakdown,
                    "singular basis during re-solve");
      }
      if (p != k) {
        for (int j = 0; j < n_; ++j) std::swap(at(k, j), at(p, j));
        std::swap(perm_[k], perm_[p]);
      }
      for (int i = k + 1; i < n_; ++i) {
        double f = at(i, k) / at(k, k);
        at(i, k) = f;
        if (f == 0.0) continue;
        for (int j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
      }
    }
  }

  // Solves M y = r.
  std::vector<double> solve(std::span<const double> r) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) y[i] = r[perm_[i]];
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < i; ++j) y[i] -= at(i, j) * y[j];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) y[i] -= at(i, j) * y[j];
      y[i] /= at(i, i);
    }
    return y;
  }

  // Solves M' y = r.
  std::vector<double> solve_transposed(std::span<const double> r) const {
    // P M = L U  =>  M' = U' L' P.
    std::vector<double> z(r.begin(), r.end());
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < i; ++j) z[i] -= at(j, i) * z[j];
      z[i] /= at(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = i + 1; j < n_; ++j) z[i] -= at(j, i) * z[j];
    }
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) y[perm_[i]] = z[i];
    return y;
  }

 private:
  double& at(int i, int j) { return lu_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const {
    return lu_[static_cast<std::size_t>(i) * n_ + j];
  }

  int n_;
  std::vector<double> lu_;
  std::vector<int> perm_;
};

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& opt)
      : lp_(lp), opt_(opt), m_(lp.num_rows), n_(lp.num_vars()) {
    sign_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      sign_[i] = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
      if (sign_[i] < 0.0) ++num_art_;
    }
    width_ = n_ + m_ + num_art_ + 1;
    t_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
    basis_.resize(m_);
    int art = n_ + m_;
    for (int j = 0; j < n_; ++j) {
      for (const auto& [row, coef] : lp.columns[j]) at(row, j) += sign_[row] * coef;
    }
    for (int i = 0; i < m_; ++i) {
      at(i, n_ + i) = sign_[i];
      rhs(i) = sign_[i] * lp.rhs[i];
      if (sign_[i] < 0.0) {
        at(i, art) = 1.0;
        basis_[i] = art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
    max_pivots_ = opt.max_pivots > 0 ? opt.max_pivots
                                     : 20000 + 200 * (m_ + n_ + num_art_);
  }

  LpSolution run() {
    LpSolution sol;
    if (num_art_ > 0) {
      std::vector<double> phase1(width_ - 1, 0.0);
      for (int j = n_ + m_; j < n_ + m_ + num_art_; ++j) phase1[j] = 1.0;
      if (iterate(phase1) == LpStatus::kUnbounded) {
        throw Error(ErrorCode::kNumericalBreakdown, "phase 1 unbounded");
      }
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (is_artificial(basis_[i])) infeas += rhs(i);
      }
      if (infeas > opt_.feasibility_tol) {
        sol.status = LpStatus::kInfeasible;
        sol.pivots = pivots_;
        return sol;
      }
      drive_out_artificials();
    }
    std::vector<double> phase2(width_ - 1, 0.0);
    for (int j = 0; j < n_; ++j) phase2[j] = lp_.costs[j];
    if (iterate(phase2) == LpStatus::kUnbounded) {
      sol.status = LpStatus::kUnbounded;
      sol.pivots = pivots_;
      return sol;
    }
    resolve_from_basis(sol);
    sol.pivots = pivots_;
    return sol;
  }

 private:
  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
  double& rhs(int i) { return at(i, width_ - 1); }
  bool is_artificial(int j) const { return j >= n_ + m_; }

  LpStatus iterate(const std::vector<double>& cost) {
    const int ncols = width_ - 1;
    std::vector<double> d(ncols);
    for (int j = 0; j < ncols; ++j) {
      double v = cost[j];
      for (int i = 0; i < m_; ++i) v -= cost[basis_[i]] * at(i, j);
      d[j] = v;
    }
    bool bland = false;
    int degenerate_run = 0;
    while (true) {
      int enter = -1;
      double best = -opt_.pricing_tol;
      for (int j = 0; j < ncols; ++j) {
        if (is_artificial(j)) continue;
        if (d[j] < best) {
          enter = j;
          if (bland) break;
          best = d[j];
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      double best_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        double a = at(i, enter);
        if (a <= opt_.pivot_tol) continue;
        double ratio = std::max(rhs(i), 0.0) / a;
        bool take = false;
        if (ratio < best_ratio - 1e-12) {
          take = true;
        } else if (ratio <= best_ratio + 1e-12) {
          take = bland ? basis_[i] < basis_[leave] : a > best_pivot;
        }
        if (take) {
          leave = i;
          best_ratio = std::min(ratio, best_ratio);
          best_pivot = a;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      if (best_pivot < opt_.breakdown_tol) {
        throw Error(ErrorCode::kNumericalBreakdown, "pivot below tolerance");
      }
      if (best_ratio <= 1e-12) {
        if (++degenerate_run >= opt_.bland_after_degenerate) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(leave, enter, d);
      if (++pivots_ > max_pivots_) {
        throw Error(ErrorCode::kNumericalBreakdown, "pivot limit exceeded");
      }
    }
  }

  void pivot(int r, int q, std::vector<double>& d) {
    const double p = at(r, q);
    for (int j = 0; j < width_; ++j) at(r, j) /= p;
    at(r, q) = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = at(i, q);
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
      at(i, q) = 0.0;
    }
    double f = d[q];
    if (f != 0.0) {
      for (int j = 0; j < width_ - 1; ++j) d[j] -= f * at(r, j);
      d[q] = 0.0;
    }
    basis_[r] = q;
  }

  void drive_out_artificials() {
    std::vector<double> dummy(width_ - 1, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      int q = -1;
      double best = opt_.pivot_tol;
      for (int j = 0; j < n_ + m_; ++j) {
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          q = j;
        }
      }
      // No candidate: the row is redundant and the artificial stays at zero.
      if (q >= 0) pivot(i, q, dummy);
    }
  }

  // Recomputes primal and duals from the final basis for accuracy.
  void resolve_from_basis(LpSolution& sol) {
    std::vector<double> bmat(static_cast<std::size_t>(m_) * m_, 0.0);
    std::vector<double> cb(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      int j = basis_[k];
      if (j < n_) {
        for (const auto& [row, coef] : lp_.columns[j]) {
          bmat[static_cast<std::size_t>(row) * m_ + k] += sign_[row] * coef;
        }
        cb[k] = lp_.costs[j];
      } else if (j < n_ + m_) {
        int row = j - n_;
        bmat[static_cast<std::size_t>(row) * m_ + k] = sign_[row];
      } else {
        // Artificial left in a redundant row: unit column on its own row.
        int row = -1;
        for (int i = 0; i < m_; ++i) {
          if (std::abs(at(i, j) - 1.0) < 1e-9 && basis_[i] == j) row = i;
        }
        bmat[static_cast<std::size_t>(row) * m_ + k] = 1.0;
      }
    }
    std::vector<double> b(m_);
    for (int i = 0; i < m_; ++i) b[i] = sign_[i] * lp_.rhs[i];

    sol.primal.assign(n_, 0.0);
    sol.duals.assign(m_, 0.0);
    if (m_ > 0) {
      DenseLu lu(bmat, m_, opt_.breakdown_tol);
      std::vector<double> xb = lu.solve(b);
      std::vector<double> pi = lu.solve_transposed(cb);
      for (int k = 0; k < m_; ++k) {
        if (basis_[k] < n_) sol.primal[basis_[k]] = std::max(xb[k], 0.0);
      }
      for (int i = 0; i < m_; ++i) {
        sol.duals[i] = std::max(-sign_[i] * pi[i], 0.0);
      }
    }
    certify(sol);
  }

  void certify(LpSolution& sol) const {
    sol.status = LpStatus::kOptimal;
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.costs[j] * sol.primal[j];
    sol.dual_objective = 0.0;
    for (int i = 0; i < m_; ++i) sol.dual_objective -= lp_.rhs[i] * sol.duals[i];
    std::vector<double> act = row_activity(lp_, sol.primal);
    sol.max_primal_residual = 0.0;
    sol.max_complementarity = 0.0;
    for (int i = 0; i < m_; ++i) {
      sol.max_primal_residual =
          std::max(sol.max_primal_residual, act[i] - lp_.rhs[i]);
      sol.max_complementarity = std::max(
          sol.max_complementarity, std::abs(sol.duals[i] * (lp_.rhs[i] - act[i])));
    }
    sol.min_reduced_cost = 0.0;
    for (int j = 0; j < n_; ++j) {
      double rc = lp_.costs[j];
      for (const auto& [row, coef] : lp_.columns[j]) rc += sol.duals[row] * coef;
      sol.min_reduced_cost = std::min(sol.min_reduced_cost, rc);
    }
  }

  const LinearProgram& lp_;
  const LpOptions& opt_;
  int m_;
  int n_;
  int num_art_ = 0;
  int width_ = 0;
  int pivots_ = 0;
  int max_pivots_ = 0;
  std::vector<double> sign_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

}  // namespace internal

// Solves the LP. Throws Error{kDimensionMismatch} on malformed input and
// Error{kNumericalBreakdown} if the basis becomes numerically singular.
inline LpSolution solve(const LinearProgram& lp, const LpOptions& options = {}) {
  lp.validate();
  internal::Tableau tableau(lp, options);
  return tableau.run();
}

}  // namespace colgen
