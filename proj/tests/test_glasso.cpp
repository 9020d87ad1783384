#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netdag/glasso.hpp"
#include "netdag/model.hpp"
#include "netdag/rng.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace netdag;

TEST_CASE("identity mask decouples into diagonal reciprocals") {
  Rng rng(41);
  Matrix s = oracles::random_spd(5, rng);
  GlassoProblem prob{s, SupportMask::identity(5), 0.3, 7};
  Matrix theta = solve_glasso(prob);
  for (Index i = 0; i < 5; ++i) CHECK(theta(i, i) == doctest::Approx(1.0 / s(i, i)).epsilon(1e-12));
  CHECK(count_nonzero_upper_offdiag(theta) == 0);
}

TEST_CASE("huge penalty with a full mask shrinks to the diagonal") {
  Rng rng(42);
  Matrix s = oracles::random_spd(4, rng);
  GlassoProblem prob{s, SupportMask::full(4), 1e9, 1};
  Matrix theta = solve_glasso(prob);
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 4; ++i) {
      if (i == j)
        CHECK(theta(i, i) == doctest::Approx(1.0 / s(i, i)).epsilon(1e-6));
      else
        CHECK(theta(i, j) == 0.0);
    }
}

TEST_CASE("dense 3x3 problem matches direct low-dimensional minimization") {
  Rng rng(43);
  for (int rep = 0; rep < 3; ++rep) {
    Matrix s = oracles::random_spd(3, rng);
    const double lambda2 = 0.1;
    const Index p_scale = 1;
    GlassoProblem prob{s, SupportMask::full(3), lambda2, p_scale};
    Matrix theta = solve_glasso(prob);
    Matrix oracle = oracles::glasso_direct_min(s, SupportMask::full(3).adjacency,
                                               lambda2 / static_cast<double>(p_scale));
    const double got = oracles::glasso_direct_objective(s, theta, lambda2);
    const double want = oracles::glasso_direct_objective(s, oracle, lambda2);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("glasso KKT conditions at the solution") {
  Rng rng(44);
  for (int rep = 0; rep < 5; ++rep) {
    const Index n = 6;
    Matrix s = oracles::random_spd(n, rng);
    // random symmetric mask
    BoolMatrix adj = BoolMatrix::Constant(n, n, false);
    adj.diagonal().setConstant(true);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i)
        if (rng.uniform() < 0.6) {
          adj(i, j) = true;
          adj(j, i) = true;
        }
    const double lambda2 = 0.4;
    const Index p_scale = 5;
    GlassoProblem prob{s, SupportMask::make(adj), lambda2, p_scale};
    Matrix theta = solve_glasso(prob);
    const double lam = lambda2 / static_cast<double>(p_scale);
    Matrix w = theta.llt().solve(Matrix::Identity(n, n));
    for (Index j = 0; j < n; ++j) {
      CHECK(std::abs(w(j, j) - s(j, j)) < 1e-5);
      for (Index i = 0; i < n; ++i) {
        if (i == j) continue;
        if (adj(i, j))
          CHECK(std::abs(w(i, j) - s(i, j)) <= lam + 1e-5);
        else
          CHECK(theta(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("block-diagonal masks solve block by block") {
  Rng rng(45);
  const Index b = 4;
  Matrix s = oracles::random_spd(2 * b, rng);
  BoolMatrix adj = BoolMatrix::Constant(2 * b, 2 * b, false);
  adj.block(0, 0, b, b).setConstant(true);
  adj.block(b, b, b, b).setConstant(true);
  GlassoProblem prob{s, SupportMask::make(adj), 0.5, 3};
  Matrix theta = solve_glasso(prob);

  for (int blk = 0; blk < 2; ++blk) {
    Matrix sb = s.block(blk * b, blk * b, b, b);
    GlassoProblem sub{sb, SupportMask::full(b), 0.5, 3};
    Matrix tb = solve_glasso(sub);
    CHECK((theta.block(blk * b, blk * b, b, b) - tb).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(theta.block(0, b, b, b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalization is a fixed point on already-normalized input") {
  Rng rng(46);
  Matrix raw = oracles::random_spd(5, rng);
  RowPrecision first = normalize_to_correlation(raw);
  RowPrecision second = normalize_to_correlation(first.theta);
  CHECK((first.theta - second.theta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("normalization maps scaled identities to the identity") {
  RowPrecision rp = normalize_to_correlation(3.7 * Matrix::Identity(4, 4));
  CHECK((rp.theta - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rp.sigma - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("normalization yields a unit-diagonal sigma and preserves support") {
  Rng rng(47);
  Matrix raw = oracles::random_spd(5, rng);
  raw(0, 2) = raw(2, 0) = 0.0;
  RowPrecision rp = normalize_to_correlation(raw);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(rp.sigma(i, i) - 1.0) < 1e-10);
  CHECK(rp.theta(0, 2) == 0.0);
  CHECK(rp.theta(2, 0) == 0.0);
  // direct inverse-and-rescale oracle
  Matrix sigma_temp = raw.inverse();
  Vector d = sigma_temp.diagonal().array().sqrt();
  Matrix theta_expected = d.asDiagonal() * raw * d.asDiagonal();
  CHECK((rp.theta - theta_expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank-deficient S is ridged and reported") {
  Rng rng(48);
  Matrix half(4, 2);
  for (Index j = 0; j < 2; ++j)
    for (Index i = 0; i < 4; ++i) half(i, j) = rng.normal();
  Matrix s = half * half.transpose();  // rank 2
  GlassoProblem prob{s, SupportMask::full(4), 0.2, 2};
  bool ridged = false;
  Matrix theta = solve_glasso(prob, nullptr, &ridged);
  CHECK(ridged);
  CHECK(theta.allFinite());
  CHECK(theta.llt().info() == Eigen::Success);
}

TEST_CASE("non-PSD input S is rejected") {
  Matrix s = Matrix::Identity(3, 3);
  s(0, 1) = s(1, 0) = 2.0;  // eigenvalue -1
  GlassoProblem prob{s, SupportMask::full(3), 0.1, 1};
  CHECK_THROWS_AS(solve_glasso(prob), std::invalid_argument);
}

TEST_CASE("warm starts do not change the solution") {
  Rng rng(49);
  Matrix s = oracles::random_spd(6, rng);
  GlassoProblem prob{s, SupportMask::full(6), 0.3, 4};
  Matrix cold = solve_glasso(prob);
  Matrix perturbed = cold;
  perturbed.diagonal().array() *= 1.1;
  Matrix warm = solve_glasso(prob, &perturbed);
  CHECK((cold - warm).cwiseAbs().maxCoeff() < 1e-7);
}
