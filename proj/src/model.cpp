#include "netdag/model.hpp"

#include <cmath>
#include <stdexcept>

namespace netdag {

Matrix sem_residuals(const DataMatrix& x, const Reparam& r) {
  if (x.p() != r.p()) throw std::invalid_argument("data and reparam disagree on p");
  return x.values * (Matrix(r.rho().asDiagonal()) - r.phi);
}

Matrix s_matrix(const DataMatrix& x, const Reparam& r) {
  Matrix u = sem_residuals(x, r);
  Matrix s = (u * u.transpose()) / static_cast<double>(x.p());
  return 0.5 * (s + s.transpose());
}

double neg_log_likelihood(const DataMatrix& x, const Reparam& r, const RowPrecision& rp) {
  if (rp.n() != x.n()) throw std::invalid_argument("row precision size does not match n");
  const auto n = static_cast<double>(x.n());
  const auto p = static_cast<double>(x.p());
  const double log_det_d = r.rho_sq.array().log().sum();
  const double log_det_theta = 2.0 * rp.chol_lower.diagonal().array().log().sum();
  Matrix u = sem_residuals(x, r);
  // p Tr(Theta S) = ||L U||_F^2 since Theta = L^T L.
  const double quad = (rp.chol_lower * u).squaredNorm();
  return -n * log_det_d - p * log_det_theta + quad;
}

double objective(const DataMatrix& x, const Reparam& r, const RowPrecision& rp,
                 const PenaltyConfig& pen) {
  pen.validate();
  return neg_log_likelihood(x, r, rp) + pen.lambda1 * l1_norm(r.phi) +
         pen.lambda2 * l1_norm_offdiag(rp.theta);
}

double bic_score(const DataMatrix& x, const Reparam& r, const RowPrecision& rp,
                 bool include_theta_df) {
  // neg_log_likelihood is already on the deviance scale (twice the negative
  // log-density up to a constant), so the likelihood term enters as is.
  const double nll = neg_log_likelihood(x, r, rp);
  Index df = count_nonzero(r.phi) + x.p();
  if (include_theta_df) df += count_nonzero_upper_offdiag(rp.theta);
  return nll + std::log(static_cast<double>(x.n())) * static_cast<double>(df);
}

Index count_nonzero(const Matrix& m) {
  Index count = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++count;
  return count;
}

Index count_nonzero_upper_offdiag(const Matrix& m) {
  Index count = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < j; ++i)
      if (m(i, j) != 0.0) ++count;
  return count;
}

double l1_norm(const Matrix& m) { return m.cwiseAbs().sum(); }

double l1_norm_offdiag(const Matrix& m) {
  return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

}  // namespace netdag
