#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdag/lasso.hpp"
#include "netdag/rng.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace netdag;
using oracles::gaussian_data;

namespace {

ColumnProblem random_problem(Index n, Index k, double lambda1, Rng& rng) {
  Vector a(n);
  Matrix design(n, k);
  for (Index i = 0; i < n; ++i) a[i] = rng.normal();
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) design(i, j) = rng.normal();
  std::vector<Index> parents(k);
  for (Index j = 0; j < k; ++j) parents[j] = j;
  return ColumnProblem{std::move(a), std::move(design), lambda1, std::move(parents)};
}

}  // namespace

TEST_CASE("solve_lasso returns zero above the critical penalty") {
  Rng rng(31);
  auto prob = random_problem(15, 4, 0.0, rng);
  const double rho = 1.3;
  const Vector corr = prob.design.transpose() * (rho * prob.a);
  prob.lambda1 = 2.0 * corr.cwiseAbs().maxCoeff() * (1.0 + 1e-12);
  auto res = solve_lasso(prob, rho);
  CHECK(res.converged);
  CHECK(res.coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve_lasso with zero penalty matches least squares") {
  Rng rng(32);
  auto prob = random_problem(25, 5, 0.0, rng);
  const double rho = 0.8;
  auto res = solve_lasso(prob, rho);
  Vector ls = (prob.design.transpose() * prob.design)
                  .ldlt()
                  .solve(prob.design.transpose() * (rho * prob.a));
  CHECK((res.coeffs - ls).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("solve_lasso matches the sign-pattern enumeration oracle") {
  Rng rng(33);
  for (int rep = 0; rep < 20; ++rep) {
    auto prob = random_problem(20, 3, 0.5, rng);
    const double rho = rng.uniform(0.5, 2.0);
    auto res = solve_lasso(prob, rho);
    auto oracle = oracles::lasso_sign_enumeration(prob.design, rho * prob.a, prob.lambda1);
    REQUIRE(oracle.has_value());
    const double got = oracles::lasso_objective(prob.design, rho * prob.a, res.coeffs, 0.5);
    const double want = oracles::lasso_objective(prob.design, rho * prob.a, *oracle, 0.5);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
    CHECK((res.coeffs - *oracle).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("lasso KKT conditions hold at the solution") {
  Rng rng(34);
  for (int rep = 0; rep < 20; ++rep) {
    const Index k = 2 + static_cast<Index>(rng.below(5));
    auto prob = random_problem(30, k, rng.uniform(0.1, 2.0), rng);
    const double rho = rng.uniform(0.5, 2.0);
    auto res = solve_lasso(prob, rho);
    const Vector grad =
        2.0 * prob.design.transpose() * (prob.design * res.coeffs - rho * prob.a);
    for (Index i = 0; i < k; ++i) {
      if (res.coeffs[i] != 0.0)
        CHECK(std::abs(grad[i] + prob.lambda1 * (res.coeffs[i] > 0 ? 1.0 : -1.0)) < 1e-5);
      else
        CHECK(std::abs(grad[i]) <= prob.lambda1 + 1e-5);
    }
  }
}

TEST_CASE("update_rho closed forms") {
  Vector a(4);
  a << 1.0, -2.0, 0.5, 1.5;
  SUBCASE("zero b gives sqrt(n)/||a||") {
    const double rho = update_rho(a, Vector::Zero(4), 10);
    CHECK(rho == doctest::Approx(std::sqrt(10.0) / a.norm()).epsilon(1e-14));
  }
  SUBCASE("a = b with ||a||^2 = n gives the golden ratio") {
    Vector unit = a / a.norm();
    const Index n = 7;
    Vector scaled = std::sqrt(static_cast<double>(n)) * unit;
    const double rho = update_rho(scaled, scaled, n);
    CHECK(rho == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
  }
  SUBCASE("zero a is an error") {
    CHECK_THROWS_AS(update_rho(Vector::Zero(4), a, 10), std::invalid_argument);
  }
}

TEST_CASE("update_rho agrees with golden-section minimization") {
  Rng rng(35);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 50;
    Vector a(n), b(n);
    for (Index i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    const double rho = update_rho(a, b, n);
    auto g = [&](double r) {
      return -2.0 * static_cast<double>(n) * std::log(r) + (r * a - b).squaredNorm();
    };
    const double oracle = oracles::golden_section_min(g, 1e-6, 50.0, 300);
    CHECK(rho == doctest::Approx(oracle).epsilon(1e-7));
    // stationarity quadratic
    const double resid = rho * rho * a.squaredNorm() - rho * a.dot(b) - static_cast<double>(n);
    CHECK(std::abs(resid) < 1e-9 * std::max(1.0, static_cast<double>(n)));
  }
}

TEST_CASE("solve_column with no parents uses the closed-form rho") {
  Rng rng(36);
  Vector a(12);
  for (Index i = 0; i < 12; ++i) a[i] = rng.normal();
  ColumnProblem prob{a, Matrix(12, 0), 0.3, {}};
  auto sol = solve_column(prob);
  CHECK(sol.phi_j.size() == 0);
  CHECK(sol.rho_j == doctest::Approx(std::sqrt(12.0) / a.norm()).epsilon(1e-14));
}

TEST_CASE("solve_column recovers a single-parent column") {
  Rng rng(37);
  const Index n = 40;
  Matrix x(n, 2);
  for (Index i = 0; i < n; ++i) x(i, 0) = rng.normal();
  x.col(1) = 0.8 * x.col(0);
  ColumnProblem prob{x.col(1), x.col(0), 0.05, {0}};
  // exact linear data: keep a touch of noise so the variance stays positive
  Vector noise(n);
  for (Index i = 0; i < n; ++i) noise[i] = 1e-3 * rng.normal();
  prob.a = x.col(1) + noise;
  auto sol = solve_column(prob);
  CHECK(sol.phi_j.size() == 1);
  CHECK(sol.phi_j[0] != 0.0);
  // recovered regression weight beta = phi / rho
  CHECK(sol.phi_j[0] / sol.rho_j == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("solve_column objective trace is non-increasing across rounds") {
  Rng rng(38);
  for (int rep = 0; rep < 10; ++rep) {
    auto prob = random_problem(25, 4, 0.4, rng);
    // replay the alternation and record objectives
    Vector phi = Vector::Zero(4);
    double rho = update_rho(prob.a, prob.design * phi, prob.n());
    double prev = column_objective(prob, phi, rho);
    for (int round = 0; round < 30; ++round) {
      auto lr = solve_lasso(prob, rho, &phi);
      phi = lr.coeffs;
      rho = update_rho(prob.a, prob.design * phi, prob.n());
      const double cur = column_objective(prob, phi, rho);
      CHECK(cur <= prev + 1e-12 * std::abs(prev));
      prev = cur;
    }
    auto sol = solve_column(prob);
    CHECK(sol.converged);
    CHECK(sol.objective_value == doctest::Approx(prev).epsilon(1e-8));
  }
}

TEST_CASE("warm and cold column solves agree in objective") {
  Rng rng(39);
  auto prob = random_problem(30, 5, 0.3, rng);
  auto cold = solve_column(prob);
  ColumnSolution init;
  init.phi_j = Vector::Constant(5, 0.2);
  init.rho_j = 2.0;
  auto warm = solve_column(prob, &init);
  CHECK(warm.objective_value ==
        doctest::Approx(cold.objective_value).epsilon(1e-5));
}
