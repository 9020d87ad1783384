#include "netdag/bcd.hpp"

#include "netdag/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace netdag {

namespace {

std::vector<Index> resolve_ordering(const FitConfig& cfg, Index p) {
  if (cfg.ordering) return *cfg.ordering;
  std::vector<Index> ord(p);
  std::iota(ord.begin(), ord.end(), Index{0});
  return ord;
}

// Second moment about the model mean (zero); this makes the first iteration
// start at the empty-model rho, so the critical penalty bound is exact.
Vector initial_rho_sq(const Matrix& x) {
  const auto n = static_cast<double>(x.rows());
  Vector rho_sq(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var = x.col(j).squaredNorm() / n;
    if (!(var > 0.0)) throw std::invalid_argument("constant-zero data column");
    rho_sq[j] = 1.0 / var;
  }
  return rho_sq;
}

double critical_penalty(const Matrix& y, const Vector& rho, const std::vector<Index>& ord) {
  const Index p = y.cols();
  const Matrix gram = y.transpose() * y;
  double best = 0.0;
  for (Index bpos = 1; bpos < p; ++bpos) {
    const Index j = ord[bpos];
    for (Index apos = 0; apos < bpos; ++apos)
      best = std::max(best, std::abs(gram(ord[apos], j)) * rho[j]);
  }
  // The zero solution satisfies the lasso optimality condition iff
  // lambda1 >= 2 |design' (rho a)| coordinatewise; the margin keeps the
  // boundary tie from flipping on rounding differences.
  return 2.0 * best * (1.0 + 1e-10);
}

Vector empty_model_rho(const Matrix& y) {
  const auto n = static_cast<double>(y.rows());
  Vector rho(y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    const double ny2 = y.col(j).squaredNorm();
    if (!(ny2 > 0.0)) throw std::invalid_argument("degenerate column under whitening");
    rho[j] = std::sqrt(n / ny2);
  }
  return rho;
}

std::pair<RowPrecision, double> line_search_impl(const RowPrecision& prev,
                                                 const RowPrecision& candidate,
                                                 const DataMatrix& x, const Reparam& r,
                                                 const PenaltyConfig& pen, int grid) {
  if (grid < 1) throw std::invalid_argument("line search grid must be positive");
  RowPrecision best = prev;
  double best_obj = objective(x, r, prev, pen);
  for (int k = 1; k <= grid; ++k) {
    const double alpha = static_cast<double>(k) / static_cast<double>(grid);
    RowPrecision cand_k =
        (k == grid) ? candidate
                    : normalize_to_correlation((1.0 - alpha) * prev.theta + alpha * candidate.theta);
    const double obj_k = objective(x, r, cand_k, pen);
    if (obj_k <= best_obj) {
      best = std::move(cand_k);
      best_obj = obj_k;
    }
  }
  return {std::move(best), best_obj};
}

// The correlation constraint leaves one nearly free degree of freedom: scaling
// Theta by c while scaling (rho, phi) by 1/sqrt(c) changes only the phi
// penalty. The normalization perturbs exactly that direction, so relax it in
// closed form: minimize over s > 0 of -2np log s + s^2 T + lambda1 s |Phi|_1
// with T the whitened residual energy at s = 1, and scale (rho, phi) by s.
Reparam rescaled_reparam(const DataMatrix& x, const Reparam& r, const RowPrecision& rp,
                         const PenaltyConfig& pen) {
  const double t = (rp.chol_lower * sem_residuals(x, r)).squaredNorm();
  if (!(t > 0.0)) return r;
  const double np = static_cast<double>(x.n() * x.p());
  const double w = pen.lambda1 * l1_norm(r.phi);
  const double s = (-w + std::sqrt(w * w + 16.0 * np * t)) / (4.0 * t);
  Reparam out = r;
  out.phi *= s;
  out.rho_sq *= s * s;
  return out;
}

struct ThetaStep {
  RowPrecision rp;
  Reparam reparam;
  double objective_value = 0.0;
  bool ridged = false;
};

// Glasso step with normalization; the candidate is searched over the convex
// path between the previous and new Theta, each point combined with the
// scale relaxation above. alpha = 0 is in the grid, so the accepted state
// never exceeds the previous objective.
ThetaStep theta_step(const DataMatrix& x, const Reparam& r, const RowPrecision& prev,
                     const SupportMask& mask, const PenaltyConfig& pen, int grid) {
  if (grid < 1) throw std::invalid_argument("line search grid must be positive");
  GlassoProblem prob{s_matrix(x, r), mask, pen.lambda2, x.p()};
  ThetaStep out;
  Matrix theta_raw = solve_glasso(prob, &prev.theta, &out.ridged);
  RowPrecision candidate = normalize_to_correlation(theta_raw);

  out.rp = prev;
  out.reparam = r;
  out.objective_value = objective(x, r, prev, pen);
  for (int k = 0; k <= grid; ++k) {
    const double alpha = static_cast<double>(k) / static_cast<double>(grid);
    RowPrecision cand_k =
        (k == 0) ? prev
                 : (k == grid ? candidate
                              : normalize_to_correlation((1.0 - alpha) * prev.theta +
                                                         alpha * candidate.theta));
    Reparam r_k = rescaled_reparam(x, r, cand_k, pen);
    double obj_k = objective(x, r_k, cand_k, pen);
    if (obj_k > out.objective_value && k == 0) {
      // scale relaxation cannot hurt at alpha = 0; guard against fp noise
      r_k = r;
      obj_k = objective(x, r, prev, pen);
    }
    if (obj_k <= out.objective_value) {
      out.rp = std::move(cand_k);
      out.reparam = std::move(r_k);
      out.objective_value = obj_k;
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

void FitConfig::validate(Index p) const {
  penalties.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (line_search_points < 2) throw std::invalid_argument("line search needs at least 2 points");
  if (ordering) {
    if (static_cast<Index>(ordering->size()) != p)
      throw std::invalid_argument("ordering length must equal p");
    std::vector<bool> seen(p, false);
    for (Index v : *ordering) {
      if (v < 0 || v >= p || seen[v]) throw std::invalid_argument("ordering is not a permutation");
      seen[v] = true;
    }
  }
}

FitResult fit(const DataMatrix& x, const SupportMask& mask, const FitConfig& cfg,
              const FitState* init) {
  Dimensions{x.n(), x.p()}.validate();
  cfg.validate(x.p());
  if (mask.n() != x.n()) throw std::invalid_argument("mask size must match n");
  const Index n = x.n();
  const Index p = x.p();
  const auto ordering = resolve_ordering(cfg, p);
  const PenaltyConfig& pen = cfg.penalties;

  Reparam r = init ? init->reparam : Reparam::make(Matrix::Zero(p, p), initial_rho_sq(x.values));
  RowPrecision rp = (init && !cfg.benchmark_identity_theta) ? init->row_precision
                                                            : RowPrecision::identity(n);

  FitResult result;
  result.objective_trace.push_back(objective(x, r, rp, pen));

  int t = 0;
  for (t = 1; t <= cfg.max_iter; ++t) {
    const Matrix prev_phi = r.phi;
    const Vector prev_rho_sq = r.rho_sq;
    const Matrix prev_theta = rp.theta;

    const Matrix y = rp.chol_lower * x.values;
    auto solve_one = [&](Index pos) {
      const Index j = ordering[pos];
      std::vector<Index> parents(ordering.begin(), ordering.begin() + pos);
      Matrix design(n, pos);
      for (Index k = 0; k < pos; ++k) design.col(k) = y.col(parents[k]);
      ColumnProblem prob{y.col(j), std::move(design), pen.lambda1, parents};

      ColumnSolution warm;
      warm.phi_j.resize(pos);
      for (Index k = 0; k < pos; ++k) warm.phi_j[k] = r.phi(parents[k], j);
      warm.rho_j = std::sqrt(r.rho_sq[j]);

      ColumnSolution sol = solve_column(prob, &warm);
      r.phi.col(j).setZero();
      for (Index k = 0; k < pos; ++k) r.phi(parents[k], j) = sol.phi_j[k];
      r.rho_sq[j] = sol.rho_j * sol.rho_j;
    };
    if (cfg.column_threads <= 1) {
      for (Index pos = 0; pos < p; ++pos) solve_one(pos);
    } else {
      // columns are independent given y; each writes only its own slots
      std::atomic<Index> next{0};
      std::vector<std::thread> pool;
      std::exception_ptr error;
      std::mutex error_mutex;
      const int workers = std::min<int>(cfg.column_threads, static_cast<int>(p));
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (;;) {
            const Index pos = next.fetch_add(1);
            if (pos >= p) return;
            try {
              solve_one(pos);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!error) error = std::current_exception();
            }
          }
        });
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
    }

    double obj_now;
    if (cfg.benchmark_identity_theta) {
      obj_now = objective(x, r, rp, pen);
    } else {
      ThetaStep step = theta_step(x, r, rp, mask, pen, cfg.line_search_points - 1);
      rp = std::move(step.rp);
      r = std::move(step.reparam);
      obj_now = step.objective_value;
      result.ridged_s = result.ridged_s || step.ridged;
    }
    result.objective_trace.push_back(obj_now);

    const double change = std::max({max_abs_diff(r.phi, prev_phi),
                                    (r.rho_sq - prev_rho_sq).cwiseAbs().maxCoeff(),
                                    max_abs_diff(rp.theta, prev_theta)});
    if (change < cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = std::min(t, cfg.max_iter);
  result.reparam = r;
  result.dag = r.to_dag();
  result.row_precision = std::move(rp);
  return result;
}

RowPrecision line_search_theta(const RowPrecision& prev, const RowPrecision& candidate,
                               const DataMatrix& x, const Reparam& r, const PenaltyConfig& pen,
                               int grid) {
  if (prev.n() != candidate.n()) throw std::invalid_argument("precision sizes differ");
  return line_search_impl(prev, candidate, x, r, pen, grid).first;
}

double lambda_max(const DataMatrix& x, const RowPrecision& rp,
                  const std::vector<Index>* ordering) {
  if (rp.n() != x.n()) throw std::invalid_argument("row precision size does not match n");
  const Index p = x.p();
  std::vector<Index> ord;
  if (ordering) {
    ord = *ordering;
  } else {
    ord.resize(p);
    std::iota(ord.begin(), ord.end(), Index{0});
  }
  const Matrix y = rp.chol_lower * x.values;
  return critical_penalty(y, empty_model_rho(y), ord);
}

double path_lambda_max(const DataMatrix& x, const SupportMask& mask, const FitConfig& cfg) {
  Dimensions{x.n(), x.p()}.validate();
  cfg.validate(x.p());
  const Index n = x.n();
  const Index p = x.p();
  const auto ordering = resolve_ordering(cfg, p);

  Vector rho_cur = empty_model_rho(x.values);
  double lmax = critical_penalty(x.values, rho_cur, ordering);
  if (cfg.benchmark_identity_theta) return lmax;

  // Follow the row-precision iterates of an empty fit. Each iteration's first
  // lasso runs at the rho carried from the previous whitening, later sweeps at
  // the refreshed one; the critical penalty must dominate both along the
  // whole trajectory for the fit to stay empty.
  RowPrecision rp = RowPrecision::identity(n);
  Reparam r = Reparam::make(Matrix::Zero(p, p), Vector(rho_cur.array().square()));
  for (int t = 1; t <= cfg.max_iter; ++t) {
    r.rho_sq = rho_cur.array().square();
    const Matrix prev_theta = rp.theta;
    ThetaStep step = theta_step(x, r, rp, mask, cfg.penalties, cfg.line_search_points - 1);
    rp = std::move(step.rp);
    const Matrix y = rp.chol_lower * x.values;
    const Vector rho_carried = step.reparam.rho();
    rho_cur = empty_model_rho(y);
    lmax = std::max({lmax, critical_penalty(y, rho_carried, ordering),
                     critical_penalty(y, rho_cur, ordering)});
    if (max_abs_diff(rp.theta, prev_theta) < cfg.tol) break;
  }
  return lmax;
}

SolutionPath solution_path(const DataMatrix& x, const SupportMask& mask, const FitConfig& cfg,
                           int num_points) {
  if (num_points < 2) throw std::invalid_argument("path needs at least 2 points");
  const double lmax = path_lambda_max(x, mask, cfg);
  if (!(lmax > 0.0)) throw std::invalid_argument("data admits no nonzero critical penalty");

  SolutionPath path;
  path.lambdas.resize(num_points);
  for (int i = 0; i < num_points; ++i)
    path.lambdas[i] =
        lmax * std::pow(0.01, static_cast<double>(i) / static_cast<double>(num_points - 1));
  path.lambdas.back() = lmax * 0.01;

  std::optional<FitState> state;
  for (int i = 0; i < num_points; ++i) {
    FitConfig cfg_i = cfg;
    cfg_i.penalties.lambda1 = path.lambdas[i];
    FitResult res;
    try {
      res = fit(x, mask, cfg_i, state ? &*state : nullptr);
    } catch (const std::runtime_error&) {
      // The saturated tail of the grid can drive the residual scatter
      // degenerate; keep the healthy prefix instead of failing the sweep.
      if (path.fits.empty()) throw;
      path.lambdas.resize(path.fits.size());
      path.truncated = true;
      break;
    }
    state = FitState{res.reparam, res.row_precision};
    path.bic_values.push_back(bic_score(x, res.reparam, res.row_precision));
    path.fits.push_back(std::move(res));
  }
  path.selected_index = static_cast<Index>(
      std::min_element(path.bic_values.begin(), path.bic_values.end()) - path.bic_values.begin());
  return path;
}

DataMatrix decorrelate(const DataMatrix& x, const RowPrecision& rp) {
  if (rp.n() != x.n()) throw std::invalid_argument("row precision size does not match n");
  Matrix star = rp.chol_lower * x.values;
  std::vector<std::string> rows;
  rows.reserve(x.n());
  for (Index i = 0; i < x.n(); ++i) rows.push_back("d" + std::to_string(i));
  return DataMatrix::make(std::move(star), x.column_labels, std::move(rows));
}

RowPrecision fit_sigma_unordered(const DataMatrix& x, const SupportMask& mask,
                                 const FitConfig& cfg, std::int64_t seed) {
  const Index p = x.p();
  std::vector<Index> perm(p);
  std::iota(perm.begin(), perm.end(), Index{0});
  if (seed >= 0) {
    Rng rng(static_cast<std::uint64_t>(seed));
    rng.shuffle(perm);
  }
  Matrix permuted(x.n(), p);
  std::vector<std::string> cols(p);
  for (Index k = 0; k < p; ++k) {
    permuted.col(k) = x.values.col(perm[k]);
    cols[k] = x.column_labels[perm[k]];
  }
  DataMatrix xp = DataMatrix::make(std::move(permuted), std::move(cols), x.row_labels);
  FitConfig cfg2 = cfg;
  cfg2.ordering.reset();
  return fit(xp, mask, cfg2).row_precision;
}

FitResult restricted_mle(const DataMatrix& x, const BoolMatrix& dag_support,
                         const SupportMask& mask) {
  Dimensions{x.n(), x.p()}.validate();
  const Index n = x.n();
  const Index p = x.p();
  if (dag_support.rows() != p || dag_support.cols() != p)
    throw std::invalid_argument("dag support must be p x p");
  if (mask.n() != n) throw std::invalid_argument("mask size must match n");
  if (!topological_order(dag_support)) throw std::invalid_argument("dag support has a cycle");

  const PenaltyConfig pen{0.0, 0.0};
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 300;
  constexpr int kGrid = 10;

  Reparam r = Reparam::make(Matrix::Zero(p, p), initial_rho_sq(x.values));
  RowPrecision rp = RowPrecision::identity(n);

  FitResult result;
  result.objective_trace.push_back(objective(x, r, rp, pen));
  int t = 0;
  for (t = 1; t <= kMaxIter; ++t) {
    const Matrix prev_phi = r.phi;
    const Vector prev_rho_sq = r.rho_sq;
    const Matrix prev_theta = rp.theta;

    const Matrix y = rp.chol_lower * x.values;
    for (Index j = 0; j < p; ++j) {
      std::vector<Index> parents;
      for (Index k = 0; k < p; ++k)
        if (k != j && dag_support(k, j)) parents.push_back(k);
      const Vector a = y.col(j);
      const double na2 = a.squaredNorm();
      if (!(na2 > 0.0)) throw std::invalid_argument("degenerate column under whitening");

      r.phi.col(j).setZero();
      if (parents.empty()) {
        r.rho_sq[j] = static_cast<double>(n) / na2;
        continue;
      }
      Matrix design(n, static_cast<Index>(parents.size()));
      for (std::size_t k = 0; k < parents.size(); ++k)
        design.col(static_cast<Index>(k)) = y.col(parents[k]);
      Eigen::ColPivHouseholderQR<Matrix> qr(design);
      if (qr.rank() < design.cols())
        throw std::runtime_error("rank-deficient parent design in restricted MLE");
      const Vector coef = qr.solve(a);
      const double resid2 = (a - design * coef).squaredNorm();
      if (!(resid2 > 0.0))
        throw std::runtime_error("zero residual in restricted MLE: variance degenerate");
      const double rho = std::sqrt(static_cast<double>(n) / resid2);
      r.rho_sq[j] = rho * rho;
      for (std::size_t k = 0; k < parents.size(); ++k)
        r.phi(parents[k], j) = rho * coef[static_cast<Index>(k)];
    }

    ThetaStep step = theta_step(x, r, rp, mask, pen, kGrid);
    rp = std::move(step.rp);
    r = std::move(step.reparam);
    result.ridged_s = result.ridged_s || step.ridged;
    result.objective_trace.push_back(step.objective_value);

    const double change = std::max({max_abs_diff(r.phi, prev_phi),
                                    (r.rho_sq - prev_rho_sq).cwiseAbs().maxCoeff(),
                                    max_abs_diff(rp.theta, prev_theta)});
    if (change < kTol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = std::min(t, kMaxIter);
  result.reparam = r;
  result.dag = r.to_dag();
  result.row_precision = std::move(rp);
  return result;
}

}  // namespace netdag
