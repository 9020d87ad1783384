#include "netdag/lasso.hpp"

#include <cmath>
#include <stdexcept>

namespace netdag {

namespace {

constexpr double kCoeffTol = 1e-7;
constexpr int kMaxSweeps = 10000;
constexpr double kObjectiveTol = 1e-8;
constexpr int kMaxRounds = 200;

}  // namespace

void ColumnProblem::validate() const {
  if (design.rows() != a.size())
    throw std::invalid_argument("design row count must match a");
  if (static_cast<Index>(parent_indices.size()) != design.cols())
    throw std::invalid_argument("parent_indices must match design columns");
  if (lambda1 < 0.0) throw std::invalid_argument("lambda1 must be nonnegative");
  if (!a.allFinite() || !design.allFinite())
    throw std::invalid_argument("column problem has non-finite entries");
}

namespace {

// Coordinate descent on the gram form: min phi' G phi - 2 c' phi + lambda |phi|_1.
// Full passes over all coordinates alternate with sweeps restricted to the
// active set; a full pass that moves nothing certifies optimality.
LassoResult lasso_gram(const Matrix& gram, const Vector& c, double lambda1, const Vector* warm,
                       Index k) {
  Vector phi = (warm && warm->size() == k) ? *warm : Vector::Zero(k);
  Vector q = gram * phi;
  const double thresh = lambda1 / 2.0;

  auto visit = [&](Index i) {
    const double gii = gram(i, i);
    if (gii <= 0.0) {
      // zero design column: coefficient pinned at zero
      if (phi[i] != 0.0) {
        q -= phi[i] * gram.col(i);
        phi[i] = 0.0;
      }
      return 0.0;
    }
    const double z = c[i] - q[i] + gii * phi[i];
    const double mag = std::abs(z) - thresh;
    const double value = mag > 0.0 ? (z > 0.0 ? mag : -mag) / gii : 0.0;
    const double d = value - phi[i];
    if (d != 0.0) {
      q += d * gram.col(i);
      phi[i] = value;
    }
    return std::abs(d);
  };

  std::vector<Index> active;
  active.reserve(k);
  int sweep = 0;
  bool converged = false;
  while (sweep < kMaxSweeps) {
    // coordinate tolerance relative to the iterate's scale
    const double tol = kCoeffTol * std::max(1.0, phi.cwiseAbs().maxCoeff());
    // full pass
    double max_change = 0.0;
    for (Index i = 0; i < k; ++i) max_change = std::max(max_change, visit(i));
    ++sweep;
    if (max_change < tol) {
      converged = true;
      break;
    }
    active.clear();
    for (Index i = 0; i < k; ++i)
      if (phi[i] != 0.0) active.push_back(i);
    // polish the active set before the next certifying pass
    while (sweep < kMaxSweeps) {
      double change = 0.0;
      for (Index i : active) change = std::max(change, visit(i));
      ++sweep;
      if (change < tol) break;
    }
  }
  return LassoResult{std::move(phi), sweep, converged};
}

}  // namespace

LassoResult solve_lasso(const ColumnProblem& prob, double rho_fixed, const Vector* warm_start) {
  prob.validate();
  if (!(rho_fixed > 0.0)) throw std::invalid_argument("rho_fixed must be positive");
  const Index k = prob.num_parents();
  if (k == 0) return LassoResult{Vector(0), 0, true};
  const Matrix gram = prob.design.transpose() * prob.design;
  const Vector c = prob.design.transpose() * (rho_fixed * prob.a);
  return lasso_gram(gram, c, prob.lambda1, warm_start, k);
}

namespace {

double rho_root(double ab, double na2, Index n) {
  if (na2 <= 0.0)
    throw std::invalid_argument("degenerate column: transformed data is identically zero");
  const double nd = static_cast<double>(n);
  return (ab + std::sqrt(ab * ab + 4.0 * nd * na2)) / (2.0 * na2);
}

}  // namespace

double update_rho(const Vector& a, const Vector& b, Index n) {
  return rho_root(a.dot(b), a.squaredNorm(), n);
}

double column_objective(const ColumnProblem& prob, const Vector& phi, double rho) {
  const auto n = static_cast<double>(prob.n());
  Vector resid = rho * prob.a;
  if (prob.num_parents() > 0) resid -= prob.design * phi;
  const double penalty = prob.num_parents() > 0 ? prob.lambda1 * phi.lpNorm<1>() : 0.0;
  return -2.0 * n * std::log(rho) + resid.squaredNorm() + penalty;
}

ColumnSolution solve_column(const ColumnProblem& prob, const ColumnSolution* init) {
  prob.validate();
  const Index k = prob.num_parents();
  const Index n = prob.n();
  const double na2 = prob.a.squaredNorm();
  if (na2 <= 0.0)
    throw std::invalid_argument("degenerate column: transformed data is identically zero");

  if (k == 0) {
    const double rho = rho_root(0.0, na2, n);
    return ColumnSolution{Vector(0), rho,
                          -2.0 * static_cast<double>(n) * std::log(rho) + rho * rho * na2, 1,
                          true};
  }

  // Everything below works on the gram form; no n-length products per round.
  const Matrix gram = prob.design.transpose() * prob.design;
  const Vector c0 = prob.design.transpose() * prob.a;
  auto objective_at = [&](const Vector& phi, double rho) {
    return -2.0 * static_cast<double>(n) * std::log(rho) + rho * rho * na2 -
           2.0 * rho * c0.dot(phi) + phi.dot(gram * phi) + prob.lambda1 * phi.lpNorm<1>();
  };

  Vector phi = (init && init->phi_j.size() == k) ? init->phi_j : Vector::Zero(k);
  double rho = (init && init->rho_j > 0.0) ? init->rho_j : rho_root(c0.dot(phi), na2, n);

  double obj = objective_at(phi, rho);
  int rounds = 0;
  bool converged = false;
  bool lasso_converged = true;
  for (; rounds < kMaxRounds; ++rounds) {
    LassoResult lr = lasso_gram(gram, rho * c0, prob.lambda1, &phi, k);
    lasso_converged = lasso_converged && lr.converged;
    const double rho_new = rho_root(c0.dot(lr.coeffs), na2, n);
    const double obj_new = objective_at(lr.coeffs, rho_new);
    if (obj_new > obj) {
      converged = true;  // numerical floor reached; keep previous iterate
      break;
    }
    phi = std::move(lr.coeffs);
    rho = rho_new;
    const double decrease = obj - obj_new;
    obj = obj_new;
    if (decrease < kObjectiveTol * std::max(1.0, std::abs(obj))) {
      converged = true;
      ++rounds;
      break;
    }
  }
  return ColumnSolution{std::move(phi), rho, obj, rounds, converged && lasso_converged};
}

}  // namespace netdag
