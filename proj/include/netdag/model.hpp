#pragma once

#include "netdag/types.hpp"

namespace netdag {

// Residual matrix with columns rho_j X_j - X phi_j.
Matrix sem_residuals(const DataMatrix& x, const Reparam& r);

// S = (1/p) sum_j (rho_j X_j - X phi_j)(rho_j X_j - X phi_j)^T, symmetric PSD.
Matrix s_matrix(const DataMatrix& x, const Reparam& r);

// -n log det D - p log det Theta + p Tr(Theta S), i.e. twice the negative
// log-density of X under the matrix normal N(0, Sigma, Psi) minus np log(2pi).
double neg_log_likelihood(const DataMatrix& x, const Reparam& r, const RowPrecision& rp);

// neg_log_likelihood + lambda1 ||Phi||_1 + lambda2 sum_{i != j} |theta_ij|.
double objective(const DataMatrix& x, const Reparam& r, const RowPrecision& rp,
                 const PenaltyConfig& pen);

// Deviance-scale likelihood plus log(n) * df; df counts nonzero phi entries,
// the p variances, and (optionally) nonzero strictly-upper off-diagonal theta
// entries.
double bic_score(const DataMatrix& x, const Reparam& r, const RowPrecision& rp,
                 bool include_theta_df = true);

Index count_nonzero(const Matrix& m);
Index count_nonzero_upper_offdiag(const Matrix& m);

double l1_norm(const Matrix& m);
double l1_norm_offdiag(const Matrix& m);

}  // namespace netdag
