#pragma once

#include "netdag/types.hpp"

namespace netdag {

// Support-constrained graphical lasso step:
//   min over Theta  -p log det(Theta) + p Tr(S Theta) + lambda2 sum_{i!=j} |theta_ij|
//   subject to supp(Theta) within mask; diagonal unpenalized.
// p_scale is the likelihood multiplier p (the solver works on the problem
// divided through by it, so lambda2 enters as lambda2 / p_scale).
struct GlassoProblem {
  Matrix s;
  SupportMask mask;
  double lambda2 = 0.0;
  Index p_scale = 1;

  void validate() const;
};

struct GlassoSolution {
  Matrix theta_raw;             // before correlation normalization
  RowPrecision row_precision;   // after normalization
  double objective_value = 0.0; // on the p-scaled objective above, at theta_raw
  bool ridged = false;          // 1e-8 diagonal ridge applied to a rank-deficient S block
};

// Solves the masked problem by block coordinate descent over columns on the
// covariance side; coordinates outside the mask are pinned to zero. Connected
// components of the mask are solved independently.
Matrix solve_glasso(const GlassoProblem& prob, const Matrix* warm_start = nullptr,
                    bool* ridged = nullptr);

// Sigma_temp = theta_raw^{-1}; rescale so diag(Sigma) = 1:
// Theta = d^{1/2} theta_raw d^{1/2} with d = diag(Sigma_temp). Support is
// unchanged. Idempotent.
RowPrecision normalize_to_correlation(const Matrix& theta_raw);

GlassoSolution solve_glasso_normalized(const GlassoProblem& prob,
                                       const Matrix* warm_start = nullptr);

// Objective of the p-scaled problem at theta.
double glasso_objective(const GlassoProblem& prob, const Matrix& theta);

// Connected components of the mask (sorted index lists).
std::vector<std::vector<Index>> mask_components(const SupportMask& mask);

}  // namespace netdag
