#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace netdag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

struct Dimensions {
  Index n = 0;  // observations (rows)
  Index p = 0;  // DAG variables (columns)
  void validate() const;
};

// n x p observation matrix with column and row identifiers.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> column_labels;
  std::vector<std::string> row_labels;

  Index n() const { return values.rows(); }
  Index p() const { return values.cols(); }

  static DataMatrix make(Matrix values, std::vector<std::string> column_labels,
                         std::vector<std::string> row_labels);
  // Synthesizes labels x1..xp / r0..r{n-1}.
  static DataMatrix from_values(Matrix values);
};

// Topological order of the directed graph whose edge k->j is support(k, j);
// nullopt when the graph has a cycle. Smallest-index-first for determinism.
std::optional<std::vector<Index>> topological_order(const BoolMatrix& support);

// Weighted adjacency B (entry (k, j) is the weight of edge k->j) and the
// noise variances omega_j^2 of the structural equation model.
struct DagParams {
  Matrix b;
  Vector omega_sq;

  Index p() const { return b.rows(); }
  BoolMatrix support() const;
  Index edge_count() const;

  static DagParams make(Matrix b, Vector omega_sq);
};

// (Phi, D) parametrization: rho_j = 1/omega_j, phi_ij = beta_ij / omega_j.
struct Reparam {
  Matrix phi;
  Vector rho_sq;

  Index p() const { return phi.rows(); }
  Vector rho() const { return rho_sq.array().sqrt(); }

  static Reparam make(Matrix phi, Vector rho_sq);
  static Reparam from_dag(const DagParams& dag);
  DagParams to_dag() const;
};

// Symmetric boolean n x n adjacency with a true diagonal; constrains the
// support of the row precision.
struct SupportMask {
  BoolMatrix adjacency;

  Index n() const { return adjacency.rows(); }
  bool allows(Index i, Index j) const { return adjacency(i, j); }

  static SupportMask make(BoolMatrix adjacency);
  static SupportMask identity(Index n);
  static SupportMask full(Index n);
  // Support of a symmetric matrix: entries with |m_ij| > tol, plus diagonal.
  static SupportMask from_support(const Matrix& m, double tol = 0.0);
};

// Lower-triangular L with theta = L^T L, so that L x whitens a vector with
// covariance theta^{-1}. Throws std::runtime_error when theta is not SPD.
Matrix whitening_cholesky(const Matrix& theta);

// Row precision theta with its inverse sigma and the factor theta = L^T L.
struct RowPrecision {
  Matrix theta;
  Matrix sigma;
  Matrix chol_lower;

  Index n() const { return theta.rows(); }

  static RowPrecision from_theta(const Matrix& theta);
  static RowPrecision identity(Index n);
};

struct PenaltyConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  void validate() const;
};

}  // namespace netdag
