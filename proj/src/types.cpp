#include "netdag/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace netdag {

void Dimensions::validate() const {
  if (n < 2 || p < 2) throw std::invalid_argument("dimensions require n >= 2 and p >= 2");
}

DataMatrix DataMatrix::make(Matrix values, std::vector<std::string> column_labels,
                            std::vector<std::string> row_labels) {
  if (!values.allFinite()) throw std::invalid_argument("data matrix has non-finite entries");
  if (static_cast<Index>(column_labels.size()) != values.cols())
    throw std::invalid_argument("column label count does not match data width");
  if (static_cast<Index>(row_labels.size()) != values.rows())
    throw std::invalid_argument("row label count does not match data height");
  return DataMatrix{std::move(values), std::move(column_labels), std::move(row_labels)};
}

DataMatrix DataMatrix::from_values(Matrix values) {
  std::vector<std::string> cols, rows;
  cols.reserve(values.cols());
  rows.reserve(values.rows());
  for (Index j = 0; j < values.cols(); ++j) cols.push_back("x" + std::to_string(j + 1));
  for (Index i = 0; i < values.rows(); ++i) rows.push_back("r" + std::to_string(i));
  return make(std::move(values), std::move(cols), std::move(rows));
}

std::optional<std::vector<Index>> topological_order(const BoolMatrix& support) {
  const Index p = support.rows();
  std::vector<Index> indeg(p, 0);
  for (Index j = 0; j < p; ++j)
    for (Index k = 0; k < p; ++k)
      if (k != j && support(k, j)) ++indeg[j];

  std::vector<Index> order;
  order.reserve(p);
  std::vector<bool> placed(p, false);
  for (Index step = 0; step < p; ++step) {
    Index next = -1;
    for (Index j = 0; j < p; ++j) {
      if (!placed[j] && indeg[j] == 0) {
        next = j;
        break;
      }
    }
    if (next < 0) return std::nullopt;  // cycle
    placed[next] = true;
    order.push_back(next);
    for (Index j = 0; j < p; ++j)
      if (j != next && support(next, j)) --indeg[j];
  }
  return order;
}

BoolMatrix DagParams::support() const {
  BoolMatrix s(b.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = 0; i < b.rows(); ++i) s(i, j) = b(i, j) != 0.0;
  return s;
}

Index DagParams::edge_count() const {
  Index count = 0;
  for (Index j = 0; j < b.cols(); ++j)
    for (Index i = 0; i < b.rows(); ++i)
      if (b(i, j) != 0.0) ++count;
  return count;
}

DagParams DagParams::make(Matrix b, Vector omega_sq) {
  if (b.rows() != b.cols()) throw std::invalid_argument("adjacency must be square");
  if (omega_sq.size() != b.rows())
    throw std::invalid_argument("omega_sq length must equal node count");
  if (!(omega_sq.array() > 0.0).all())
    throw std::invalid_argument("omega_sq entries must be strictly positive");
  if (!b.allFinite()) throw std::invalid_argument("adjacency has non-finite entries");
  DagParams dag{std::move(b), std::move(omega_sq)};
  if (!topological_order(dag.support())) throw std::invalid_argument("adjacency has a cycle");
  return dag;
}

Reparam Reparam::make(Matrix phi, Vector rho_sq) {
  if (phi.rows() != phi.cols()) throw std::invalid_argument("phi must be square");
  if (rho_sq.size() != phi.rows()) throw std::invalid_argument("rho_sq length must equal node count");
  if (!(rho_sq.array() > 0.0).all())
    throw std::invalid_argument("rho_sq entries must be strictly positive");
  if (!phi.allFinite()) throw std::invalid_argument("phi has non-finite entries");
  Reparam r{std::move(phi), std::move(rho_sq)};
  BoolMatrix s(r.phi.rows(), r.phi.cols());
  for (Index j = 0; j < r.phi.cols(); ++j)
    for (Index i = 0; i < r.phi.rows(); ++i) s(i, j) = r.phi(i, j) != 0.0;
  if (!topological_order(s)) throw std::invalid_argument("phi support has a cycle");
  return r;
}

Reparam Reparam::from_dag(const DagParams& dag) {
  Vector rho_sq = dag.omega_sq.array().inverse();
  Vector rho = rho_sq.array().sqrt();
  Matrix phi = dag.b * rho.asDiagonal();
  return Reparam{std::move(phi), std::move(rho_sq)};
}

DagParams Reparam::to_dag() const {
  Vector omega_sq = rho_sq.array().inverse();
  Vector omega = omega_sq.array().sqrt();
  Matrix b = phi * omega.asDiagonal();
  return DagParams::make(std::move(b), std::move(omega_sq));
}

SupportMask SupportMask::make(BoolMatrix adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw std::invalid_argument("mask must be square");
  const Index n = adjacency.rows();
  for (Index i = 0; i < n; ++i) {
    if (!adjacency(i, i)) throw std::invalid_argument("mask diagonal must be true");
    for (Index j = i + 1; j < n; ++j)
      if (adjacency(i, j) != adjacency(j, i)) throw std::invalid_argument("mask must be symmetric");
  }
  return SupportMask{std::move(adjacency)};
}

SupportMask SupportMask::identity(Index n) {
  BoolMatrix a = BoolMatrix::Constant(n, n, false);
  a.diagonal().setConstant(true);
  return SupportMask{std::move(a)};
}

SupportMask SupportMask::full(Index n) {
  return SupportMask{BoolMatrix::Constant(n, n, true)};
}

SupportMask SupportMask::from_support(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  const Index n = m.rows();
  BoolMatrix a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      a(i, j) = i == j || std::abs(m(i, j)) > tol || std::abs(m(j, i)) > tol;
  return make(std::move(a));
}

Matrix whitening_cholesky(const Matrix& theta) {
  // theta = L^T L with L lower triangular: factor the double-flipped matrix
  // J theta J = C C^T and flip back, L = (J C J)^T.
  Matrix flipped = theta.reverse();
  Eigen::LLT<Matrix> llt(flipped);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("matrix is not positive definite");
  Matrix c = llt.matrixL();
  Matrix l = c.reverse().transpose();
  return l;
}

RowPrecision RowPrecision::from_theta(const Matrix& theta) {
  if (theta.rows() != theta.cols()) throw std::invalid_argument("theta must be square");
  if (!theta.allFinite()) throw std::invalid_argument("theta has non-finite entries");
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  if ((theta - theta.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("theta must be symmetric");
  Matrix sym = 0.5 * (theta + theta.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("theta is not positive definite");
  Matrix sigma = llt.solve(Matrix::Identity(sym.rows(), sym.cols()));
  Matrix l = whitening_cholesky(sym);
  return RowPrecision{std::move(sym), std::move(sigma), std::move(l)};
}

RowPrecision RowPrecision::identity(Index n) {
  return RowPrecision{Matrix::Identity(n, n), Matrix::Identity(n, n), Matrix::Identity(n, n)};
}

void PenaltyConfig::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0) throw std::invalid_argument("penalties must be nonnegative");
}

}  // namespace netdag
