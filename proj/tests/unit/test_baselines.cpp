#include "cass/baselines.hpp"
#include "cass/data.hpp"
#include "frozen.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cass;

TEST_SUITE("solve_lsr") {
  TEST_CASE("frozen ridge reference") {
    const Vector w = solve_lsr(frozen::ridge_X(), frozen::ridge_y(), frozen::kRidgeLambda);
    CHECK((w - frozen::ridge_w()).lpNorm<Eigen::Infinity>() < 1e-12);
  }

  TEST_CASE("first-order optimality") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix X = oracle::unit_columns(oracle::random_gaussian(12, 20, rng));
      const Vector y = oracle::random_gaussian(12, rng);
      const double lambda = trial % 2 ? 0.01 : 1.0;
      const Vector w = solve_lsr(X, y, lambda);
      const Vector grad = 2.0 * X.transpose() * (X * w - y) + 2.0 * lambda * w;
      CHECK(grad.lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }

  TEST_CASE("orthonormal dictionary shrinks the projection") {
    std::mt19937_64 rng(2);
    const Matrix X = oracle::random_orthonormal(9, 4, rng);
    const Vector y = oracle::random_gaussian(9, rng);
    CHECK((solve_lsr(X, y, 0.5) - X.transpose() * y / 1.5).norm() < 1e-13);
  }

  TEST_CASE("huge lambda shrinks to zero") {
    std::mt19937_64 rng(3);
    const Matrix X = oracle::random_gaussian(6, 5, rng);
    const Vector y = oracle::random_gaussian(6, rng);
    CHECK(solve_lsr(X, y, 1e8).lpNorm<Eigen::Infinity>() <= 1e-6 * (X.transpose() * y).lpNorm<Eigen::Infinity>());
  }

  TEST_CASE("duplicate columns get equal weights") {
    std::mt19937_64 rng(4);
    Matrix X = oracle::random_gaussian(7, 6, rng);
    X.col(5) = X.col(2);
    const Vector w = solve_lsr(X, oracle::random_gaussian(7, rng), 0.1);
    CHECK(std::abs(w(2) - w(5)) <= 1e-12);
  }

  TEST_CASE("lambda must be positive") {
    CHECK_THROWS_AS(solve_lsr(Matrix::Identity(2, 2), Vector::Ones(2), 0.0), std::invalid_argument);
  }
}

TEST_SUITE("solve_ssc") {
  TEST_CASE("frozen lasso reference") {
    const SscResult r = solve_ssc(frozen::lasso_X(), frozen::lasso_y(), frozen::kLassoLambda);
    CHECK(r.converged);
    CHECK(std::abs(r.objective - frozen::kLassoObjective) <= 1e-9);
    CHECK((r.w - frozen::lasso_w()).lpNorm<Eigen::Infinity>() < 1e-5);
  }

  TEST_CASE("matches coordinate descent on small instances") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix X = oracle::unit_columns(oracle::random_gaussian(5, 6, rng));
      const Vector y = oracle::random_gaussian(5, rng);
      const double lambda = 0.2;
      const SscResult r = solve_ssc(X, y, lambda);
      const Vector ref = oracle::lasso_coordinate_descent(X, y, lambda);
      CHECK(std::abs(r.objective - oracle::lasso_objective(X, y, ref, lambda)) <= 1e-5);
    }
  }

  TEST_CASE("large lambda gives exactly zero") {
    std::mt19937_64 rng(6);
    const Matrix X = oracle::random_gaussian(6, 8, rng);
    const Vector y = oracle::random_gaussian(6, rng);
    const SscResult r = solve_ssc(X, y, 2.0 * (X.transpose() * y).lpNorm<Eigen::Infinity>());
    CHECK(r.w.norm() == 0.0);
  }

  TEST_CASE("orthonormal dictionary soft-thresholds the projection") {
    std::mt19937_64 rng(7);
    const Matrix X = oracle::random_orthonormal(10, 6, rng);
    const Vector y = oracle::random_gaussian(10, rng);
    const SscResult r = solve_ssc(X, y, 0.4);
    CHECK((r.w - soft_threshold(X.transpose() * y, 0.2)).lpNorm<Eigen::Infinity>() < 1e-8);
  }

  TEST_CASE("objective history never increases") {
    std::mt19937_64 rng(8);
    const Matrix X = oracle::unit_columns(oracle::random_gaussian(15, 30, rng));
    const Vector y = oracle::random_gaussian(15, rng);
    const SscResult r = solve_ssc(X, y, 0.05);
    REQUIRE(r.objective_history.size() > 2);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      CHECK(r.objective_history[i] <= r.objective_history[i - 1]);
    }
  }

  TEST_CASE("iteration cap reports non-convergence") {
    std::mt19937_64 rng(9);
    const Matrix X = oracle::unit_columns(oracle::random_gaussian(15, 30, rng));
    const Vector y = oracle::random_gaussian(15, rng);
    const SscResult r = solve_ssc(X, y, 0.01, 1e-12, 3);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
  }

  TEST_CASE("deterministic") {
    std::mt19937_64 rng(10);
    const Matrix X = oracle::random_gaussian(8, 12, rng);
    const Vector y = oracle::random_gaussian(8, rng);
    CHECK((solve_ssc(X, y, 0.1).w - solve_ssc(X, y, 0.1).w).norm() == 0.0);
  }
}

TEST_SUITE("solve_lrr") {
  TEST_CASE("clean independent subspaces recover the shape interaction matrix") {
    SyntheticSpec spec = SyntheticSpec::uniform(3, 3, 20, 10, 0.0, 4);
    const Matrix X = gen_synthetic(spec).X;
    const LrrResult r = solve_lrr(X, 100.0);
    CHECK(r.converged);
    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinV);
    const Matrix Vr = svd.matrixV().leftCols(9);
    const Matrix expected = Vr * Vr.transpose();
    CHECK((r.W - expected).norm() <= 1e-2 * expected.norm());
  }

  TEST_CASE("repeated sample gives a rank-one representation") {
    std::mt19937_64 rng(11);
    const Vector x = oracle::random_gaussian(6, rng);
    const Matrix X = x * Vector::Ones(5).transpose();
    const LrrResult r = solve_lrr(X, 10.0);
    const Vector s = oracle::singular_values_by_gram(r.W);
    CHECK(s(1) <= 1e-6 * s(0));
  }

  TEST_CASE("column corruption is absorbed by E") {
    SyntheticSpec spec = SyntheticSpec::uniform(2, 3, 30, 20, 0.0, 12);
    Matrix X = gen_synthetic(spec).X;
    std::mt19937_64 rng(13);
    for (int j : {5, 27}) X.col(j) += 3.0 * oracle::random_gaussian(30, rng).normalized();
    const LrrResult r = solve_lrr(X, 0.3);
    CHECK(r.converged);
    double total = 0.0, corrupted = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double c = r.E.col(j).norm();
      total += c;
      if (j == 5 || j == 27) corrupted += c;
    }
    REQUIRE(total > 0.0);
    CHECK(corrupted >= 0.9 * total);
  }

  TEST_CASE("constraint holds at convergence") {
    std::mt19937_64 rng(14);
    const Matrix X = oracle::random_gaussian(8, 12, rng);
    const LrrResult r = solve_lrr(X, 0.3);
    REQUIRE(r.converged);
    CHECK((X - X * r.W - r.E).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}
