#pragma once

#include "netdag/types.hpp"

namespace netdag {

// Per-column convex subproblem on whitened data:
//   min over (rho, phi)  -n log rho^2 + ||rho a - design phi||^2 + lambda1 ||phi||_1
// with a = L X_j and design columns L X_k for the eligible parents k.
struct ColumnProblem {
  Vector a;
  Matrix design;
  double lambda1 = 0.0;
  std::vector<Index> parent_indices;

  Index n() const { return a.size(); }
  Index num_parents() const { return design.cols(); }
  void validate() const;
};

struct LassoResult {
  Vector coeffs;
  int sweeps = 0;
  bool converged = true;
};

struct ColumnSolution {
  Vector phi_j;  // over parent_indices
  double rho_j = 0.0;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = true;
};

// argmin over phi of ||rho_fixed a - design phi||^2 + lambda1 ||phi||_1 by
// cyclic coordinate descent with soft thresholding. Sweep order is ascending
// index; a coordinate exactly at the threshold resolves to zero.
LassoResult solve_lasso(const ColumnProblem& prob, double rho_fixed,
                        const Vector* warm_start = nullptr);

// Unique positive minimizer of g(rho) = -n log rho^2 + ||rho a - b||^2, the
// positive root of rho^2 ||a||^2 - rho (a.b) - n = 0.
double update_rho(const Vector& a, const Vector& b, Index n);

// Eq-objective value at (phi, rho).
double column_objective(const ColumnProblem& prob, const Vector& phi, double rho);

// Alternates solve_lasso and update_rho until the objective decrease between
// rounds drops below 1e-8; the objective is non-increasing across rounds.
ColumnSolution solve_column(const ColumnProblem& prob, const ColumnSolution* init = nullptr);

}  // namespace netdag
