#include "netdag/glasso.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace netdag {

namespace {

constexpr double kRidge = 1e-8;
constexpr int kMaxOuterSweeps = 500;
constexpr int kMaxInnerSweeps = 1000;

double soft(double z, double t) {
  const double m = std::abs(z) - t;
  return m > 0.0 ? (z > 0.0 ? m : -m) : 0.0;
}

// Lasso for one column of the covariance-side update:
//   min 0.5 beta' W11 beta - s12' beta + lam ||beta||_1, beta_i = 0 off the mask.
void column_lasso(const Matrix& w11, const Vector& s12, const std::vector<bool>& free,
                  double lam, Vector& beta) {
  const Index m = s12.size();
  Vector grad = w11 * beta;  // W11 beta, maintained incrementally
  for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
    double max_change = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (!free[i]) {
        if (beta[i] != 0.0) {
          grad -= beta[i] * w11.col(i);
          beta[i] = 0.0;
        }
        continue;
      }
      const double wii = w11(i, i);
      if (wii <= 0.0) throw std::runtime_error("graphical lasso working matrix lost positive diagonal");
      const double z = s12[i] - grad[i] + wii * beta[i];
      const double value = lam > 0.0 ? soft(z, lam) / wii : z / wii;
      const double d = value - beta[i];
      if (d != 0.0) {
        grad += d * w11.col(i);
        beta[i] = value;
        max_change = std::max(max_change, std::abs(d));
      }
    }
    if (max_change < 1e-11 * std::max(1.0, s12.cwiseAbs().maxCoeff())) break;
  }
}

// Exact solve of the unpenalized column problem over the free coordinates.
void column_exact(const Matrix& w11, const Vector& s12, const std::vector<bool>& free,
                  Vector& beta) {
  const Index m = s12.size();
  std::vector<Index> idx;
  for (Index i = 0; i < m; ++i)
    if (free[i]) idx.push_back(i);
  beta.setZero();
  if (idx.empty()) return;
  const Index f = static_cast<Index>(idx.size());
  Matrix a(f, f);
  Vector b(f);
  for (Index r = 0; r < f; ++r) {
    b[r] = s12[idx[r]];
    for (Index c = 0; c < f; ++c) a(r, c) = w11(idx[r], idx[c]);
  }
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("graphical lasso column system is singular");
  Vector sol = ldlt.solve(b);
  for (Index r = 0; r < f; ++r) beta[idx[r]] = sol[r];
}

struct BlockResult {
  Matrix theta;
  bool ridged = false;
};

BlockResult solve_block(const Matrix& s_block, const std::vector<std::vector<bool>>& free,
                        double lam, const Matrix* warm_theta) {
  const Index m = s_block.rows();
  BlockResult out;
  if (m == 1) {
    if (!(s_block(0, 0) > 0.0)) throw std::runtime_error("nonpositive diagonal in S");
    out.theta = Matrix::Constant(1, 1, 1.0 / s_block(0, 0));
    return out;
  }

  Matrix s = s_block;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, s.diagonal().maxCoeff());
    const double emin = es.eigenvalues().minCoeff();
    if (emin < -1e-8 * scale) throw std::invalid_argument("S is not positive semidefinite");
    if (emin < 1e-8 * scale) {
      s.diagonal().array() += kRidge;
      out.ridged = true;
    }
  }

  Matrix w = s;
  std::vector<Vector> beta(m, Vector::Zero(m - 1));
  if (warm_theta && warm_theta->rows() == m) {
    for (Index j = 0; j < m; ++j) {
      const double tjj = (*warm_theta)(j, j);
      if (tjj > 0.0) {
        Index r = 0;
        for (Index i = 0; i < m; ++i) {
          if (i == j) continue;
          beta[j][r++] = -(*warm_theta)(i, j) / tjj;
        }
      }
    }
  }

  const double w_tol = 1e-9 * std::max(1.0, s.cwiseAbs().maxCoeff());
  Vector s12(m - 1), w12(m - 1);
  Matrix w11(m - 1, m - 1);
  for (int sweep = 0; sweep < kMaxOuterSweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < m; ++j) {
      Index r = 0;
      std::vector<bool> free_j(m - 1);
      for (Index i = 0; i < m; ++i) {
        if (i == j) continue;
        s12[r] = s(i, j);
        free_j[r] = free[j][static_cast<std::size_t>(i)];
        Index c = 0;
        for (Index k = 0; k < m; ++k) {
          if (k == j) continue;
          w11(r, c++) = w(i, k);
        }
        ++r;
      }
      if (lam > 0.0)
        column_lasso(w11, s12, free_j, lam, beta[j]);
      else
        column_exact(w11, s12, free_j, beta[j]);
      w12 = w11 * beta[j];
      r = 0;
      for (Index i = 0; i < m; ++i) {
        if (i == j) continue;
        max_change = std::max(max_change, std::abs(w(i, j) - w12[r]));
        w(i, j) = w12[r];
        w(j, i) = w12[r];
        ++r;
      }
    }
    if (max_change < w_tol) break;
  }

  // Recover Theta from the final working covariance and column coefficients.
  Matrix theta = Matrix::Zero(m, m);
  for (Index j = 0; j < m; ++j) {
    Index r = 0;
    double quad = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (i == j) continue;
      quad += w(i, j) * beta[j][r];
      ++r;
    }
    const double den = w(j, j) - quad;
    if (!(den > 0.0))
      throw std::runtime_error(
          "graphical lasso lost positive definiteness (lambda2 too small for a degenerate S)");
    const double tjj = 1.0 / den;
    theta(j, j) = tjj;
    r = 0;
    for (Index i = 0; i < m; ++i) {
      if (i == j) continue;
      if (free[j][static_cast<std::size_t>(i)] && beta[j][r] != 0.0) theta(i, j) = -beta[j][r] * tjj;
      ++r;
    }
  }
  // Symmetrize; masked coordinates are exactly zero on both sides already.
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < j; ++i) {
      const double v = (theta(i, j) != 0.0 && theta(j, i) != 0.0)
                           ? 0.5 * (theta(i, j) + theta(j, i))
                           : (theta(i, j) != 0.0 ? theta(i, j) : theta(j, i));
      theta(i, j) = v;
      theta(j, i) = v;
    }
  out.theta = std::move(theta);
  return out;
}

}  // namespace

void GlassoProblem::validate() const {
  if (s.rows() != s.cols()) throw std::invalid_argument("S must be square");
  if (mask.n() != s.rows()) throw std::invalid_argument("mask size must match S");
  if (lambda2 < 0.0) throw std::invalid_argument("lambda2 must be nonnegative");
  if (p_scale < 1) throw std::invalid_argument("p_scale must be at least 1");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("S must be symmetric");
}

std::vector<std::vector<Index>> mask_components(const SupportMask& mask) {
  const Index n = mask.n();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<Index>> out;
  for (Index start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    std::vector<Index> members;
    std::vector<Index> stack{start};
    comp[start] = id;
    while (!stack.empty()) {
      Index v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (Index u = 0; u < n; ++u) {
        if (u != v && mask.allows(v, u) && comp[u] < 0) {
          comp[u] = id;
          stack.push_back(u);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

Matrix solve_glasso(const GlassoProblem& prob, const Matrix* warm_start, bool* ridged) {
  prob.validate();
  const Index n = prob.s.rows();
  const double lam = prob.lambda2 / static_cast<double>(prob.p_scale);

  Matrix theta = Matrix::Zero(n, n);
  bool any_ridged = false;
  for (const auto& comp : mask_components(prob.mask)) {
    const Index m = static_cast<Index>(comp.size());
    Matrix s_block(m, m);
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < m; ++c) s_block(r, c) = prob.s(comp[r], comp[c]);
    s_block = 0.5 * (s_block + s_block.transpose());

    // free[j][i]: off-diagonal coordinate (i, j) inside the block is inside the mask
    std::vector<std::vector<bool>> free(m, std::vector<bool>(m, false));
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < m; ++i)
        if (i != j) free[j][static_cast<std::size_t>(i)] = prob.mask.allows(comp[i], comp[j]);

    Matrix warm_block;
    const Matrix* warm_ptr = nullptr;
    if (warm_start && warm_start->rows() == n) {
      warm_block.resize(m, m);
      for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) warm_block(r, c) = (*warm_start)(comp[r], comp[c]);
      warm_ptr = &warm_block;
    }

    BlockResult br = solve_block(s_block, free, lam, warm_ptr);
    any_ridged = any_ridged || br.ridged;
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < m; ++c) theta(comp[r], comp[c]) = br.theta(r, c);
  }
  if (ridged) *ridged = any_ridged;
  return theta;
}

RowPrecision normalize_to_correlation(const Matrix& theta_raw) {
  if (theta_raw.rows() != theta_raw.cols()) throw std::invalid_argument("theta must be square");
  const Index n = theta_raw.rows();
  Eigen::LLT<Matrix> llt(theta_raw);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("theta is not positive definite");
  Matrix sigma_temp = llt.solve(Matrix::Identity(n, n));
  Vector d = sigma_temp.diagonal();
  Vector s = d.array().sqrt();
  Vector s_inv = s.array().inverse();

  Matrix theta = s.asDiagonal() * theta_raw * s.asDiagonal();
  Matrix sigma = s_inv.asDiagonal() * sigma_temp * s_inv.asDiagonal();
  theta = 0.5 * (theta + theta.transpose());
  sigma = 0.5 * (sigma + sigma.transpose());
  sigma.diagonal().setOnes();
  Matrix l = whitening_cholesky(theta);
  return RowPrecision{std::move(theta), std::move(sigma), std::move(l)};
}

GlassoSolution solve_glasso_normalized(const GlassoProblem& prob, const Matrix* warm_start) {
  GlassoSolution sol;
  sol.theta_raw = solve_glasso(prob, warm_start, &sol.ridged);
  sol.objective_value = glasso_objective(prob, sol.theta_raw);
  sol.row_precision = normalize_to_correlation(sol.theta_raw);
  return sol;
}

double glasso_objective(const GlassoProblem& prob, const Matrix& theta) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("theta is not positive definite");
  const double log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  const double tr = (prob.s * theta).trace();
  const double l1 = theta.cwiseAbs().sum() - theta.diagonal().cwiseAbs().sum();
  return static_cast<double>(prob.p_scale) * (-log_det + tr) + prob.lambda2 * l1;
}

}  // namespace netdag
