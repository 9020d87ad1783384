#pragma once

#include "netdag/glasso.hpp"
#include "netdag/lasso.hpp"
#include "netdag/model.hpp"
#include "netdag/types.hpp"

#include <cstdint>
#include <optional>

namespace netdag {

struct FitConfig {
  PenaltyConfig penalties;
  double tol = 1e-4;   // max-norm parameter-change convergence threshold
  int max_iter = 50;
  std::optional<std::vector<Index>> ordering;  // node order; identity when absent
  bool benchmark_identity_theta = false;       // hold Theta = I (no row-correlation step)
  int line_search_points = 11;                 // alpha grid 0, 1/(points-1), ..., 1
  int column_threads = 1;                      // the per-column solves are independent

  void validate(Index p) const;
};

struct FitResult {
  DagParams dag;
  Reparam reparam;
  RowPrecision row_precision;
  std::vector<double> objective_trace;  // initial value plus one entry per iteration
  bool converged = false;
  int iterations = 0;
  bool ridged_s = false;  // ridge applied inside the row-precision step
};

struct SolutionPath {
  std::vector<double> lambdas;  // strictly descending
  std::vector<FitResult> fits;
  std::vector<double> bic_values;
  Index selected_index = 0;
  bool truncated = false;  // stopped early on a numerically degenerate tail
};

struct FitState {
  Reparam reparam;
  RowPrecision row_precision;
};

// Block coordinate descent: per iteration, (a) each column's (phi_j, rho_j)
// subproblem on L-whitened data, (b) the masked graphical-lasso step with
// correlation normalization, (c) a line search between the previous and new
// Theta whenever the new one fails to decrease the objective. Stops when the
// max-norm parameter change drops below cfg.tol or after cfg.max_iter rounds.
FitResult fit(const DataMatrix& x, const SupportMask& mask, const FitConfig& cfg,
              const FitState* init = nullptr);

// Evaluates Theta(alpha) = normalize_to_correlation((1-alpha) prev + alpha cand)
// on the grid alpha in {0, 1/grid, ..., 1} and returns the objective minimizer;
// alpha = 0 is in the grid, so the result never exceeds the previous objective.
// Ties resolve toward larger alpha.
RowPrecision line_search_theta(const RowPrecision& prev, const RowPrecision& candidate,
                               const DataMatrix& x, const Reparam& r, const PenaltyConfig& pen,
                               int grid);

// Critical penalty: 2 * max over columns j and eligible parents k of
// |(L X_k)' (rho_j^0 L X_j)|, with rho_j^0 the empty-model rho update. Every
// per-column lasso returns zero at this penalty for the given row precision.
double lambda_max(const DataMatrix& x, const RowPrecision& rp,
                  const std::vector<Index>* ordering = nullptr);

// Largest lambda1 that keeps the whole fit empty: the max of lambda_max over
// the row-precision iterates the algorithm visits while Phi stays zero.
double path_lambda_max(const DataMatrix& x, const SupportMask& mask, const FitConfig& cfg);

// Log-spaced grid of num_points values from path_lambda_max down to its 1/100,
// fit warm-started from large to small lambda1; BIC marks the selected fit.
SolutionPath solution_path(const DataMatrix& x, const SupportMask& mask, const FitConfig& cfg,
                           int num_points);

// X* = L X; column labels preserved, row labels replaced by synthetic ones.
DataMatrix decorrelate(const DataMatrix& x, const RowPrecision& rp);

// Applies a seeded random column permutation before fitting and returns only
// the row precision, which is invariant to the permutation. A negative seed
// requests the identity permutation.
RowPrecision fit_sigma_unordered(const DataMatrix& x, const SupportMask& mask,
                                 const FitConfig& cfg, std::int64_t seed);

// Maximum-likelihood fit (no penalties) with each column restricted to the
// parents in dag_support and the row precision support-constrained by mask.
FitResult restricted_mle(const DataMatrix& x, const BoolMatrix& dag_support,
                         const SupportMask& mask);

}  // namespace netdag
