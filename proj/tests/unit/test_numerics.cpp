#include "cass/numerics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cass;

namespace {

Matrix diag_factorized(std::mt19937_64& rng, const Vector& sigma, Eigen::Index rows, Eigen::Index cols) {
  const Matrix U = oracle::random_orthonormal(rows, sigma.size(), rng);
  const Matrix V = oracle::random_orthonormal(cols, sigma.size(), rng);
  return U * sigma.asDiagonal() * V.transpose();
}

double svt_objective(const Matrix& J, const Matrix& M, double tau) {
  return tau * oracle::singular_values_by_gram(J).sum() + 0.5 * (J - M).squaredNorm();
}

}  // namespace

TEST_SUITE("svd") {
  TEST_CASE("identity has unit singular values") {
    const SvdFactors f = svd(Matrix::Identity(3, 3));
    CHECK((f.singular_values - Vector::Ones(3)).norm() < 1e-14);
  }

  TEST_CASE("zero matrix has zero singular values") {
    const SvdFactors f = svd(Matrix::Zero(2, 4));
    REQUIRE(f.singular_values.size() == 2);
    CHECK(f.singular_values.norm() == 0.0);
  }

  TEST_CASE("constructed spectrum is recovered") {
    std::mt19937_64 rng(11);
    const Vector sigma = (Vector(3) << 5, 2, 1).finished();
    const Matrix M = diag_factorized(rng, sigma, 4, 3);
    const SvdFactors f = svd(M);
    CHECK((f.singular_values - sigma).norm() < 1e-10);
    CHECK((f.reconstruct() - M).norm() <= tol::kFactorization * M.norm());
    CHECK((f.U.transpose() * f.U - Matrix::Identity(3, 3)).norm() < tol::kOrthonormality);
    CHECK((f.V.transpose() * f.V - Matrix::Identity(3, 3)).norm() < tol::kOrthonormality);
  }

  TEST_CASE("thin factors for wide and tall inputs") {
    std::mt19937_64 rng(3);
    for (auto [r, c] : {std::pair{5, 9}, std::pair{9, 5}}) {
      const Matrix M = oracle::random_gaussian(r, c, rng);
      const SvdFactors f = svd(M);
      const Eigen::Index k = std::min(r, c);
      CHECK(f.U.cols() == k);
      CHECK(f.V.cols() == k);
      CHECK((f.reconstruct() - M).norm() <= tol::kFactorization * M.norm());
      CHECK((f.singular_values - oracle::singular_values_by_gram(M)).norm() < 1e-10);
    }
  }

  TEST_CASE("vectors: the singular value is the norm") {
    const Vector v = (Vector(3) << 3, 0, 4).finished();
    CHECK(svd(Matrix(v)).singular_values(0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(svd(Matrix(v.transpose())).singular_values(0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(nuclear_norm(Matrix::Constant(1, 1, -2.0)) == doctest::Approx(2.0));
  }

  TEST_CASE("non-finite or empty input is rejected") {
    Matrix M = Matrix::Ones(2, 2);
    M(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(M), std::invalid_argument);
    CHECK_THROWS_AS(svd(Matrix(0, 3)), std::invalid_argument);
  }
}

TEST_SUITE("nuclear_norm") {
  TEST_CASE("basic values") {
    CHECK(nuclear_norm(Matrix::Zero(3, 2)) == 0.0);
    CHECK(nuclear_norm(Matrix::Identity(4, 4)) == doctest::Approx(4.0).epsilon(1e-14));
    std::mt19937_64 rng(5);
    const Matrix M = diag_factorized(rng, (Vector(3) << 5, 2, 1).finished(), 4, 3);
    CHECK(std::abs(nuclear_norm(M) - 8.0) < 1e-9);
  }

  TEST_CASE("dropping columns never increases the norm; equality iff they are zero") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
      const Matrix A1 = oracle::random_gaussian(6, 4, rng);
      const Matrix A2 = oracle::random_gaussian(6, 3, rng);
      Matrix A(6, 7);
      A << A1, A2;
      CHECK(nuclear_norm(A) > nuclear_norm(A1) + 1e-9);
      A.rightCols(3).setZero();
      CHECK(std::abs(nuclear_norm(A) - nuclear_norm(A1)) < 1e-12 * nuclear_norm(A1));
    }
  }
}

TEST_SUITE("svt") {
  TEST_CASE("zero threshold is the identity map") {
    std::mt19937_64 rng(2);
    const Matrix M = oracle::random_gaussian(4, 6, rng);
    CHECK((svt(M, 0.0) - M).norm() < 1e-10);
  }

  TEST_CASE("threshold above the top singular value gives zero") {
    std::mt19937_64 rng(2);
    const Matrix M = oracle::random_gaussian(4, 6, rng);
    CHECK(svt(M, oracle::singular_values_by_gram(M)(0) + 1e-9).norm() == 0.0);
  }

  TEST_CASE("diagonal example") {
    const Matrix M = Vector((Vector(2) << 3, 1).finished()).asDiagonal();
    const Matrix expected = Vector((Vector(2) << 1, 0).finished()).asDiagonal();
    CHECK((svt(M, 2.0) - expected).norm() < 1e-14);
  }

  TEST_CASE("negative threshold is an error") { CHECK_THROWS_AS(svt(Matrix::Identity(2, 2), -1.0), std::invalid_argument); }

  TEST_CASE("local optimality against random perturbations") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss;
    for (double tau : {0.1, 1.0}) {
      const Matrix M = oracle::random_gaussian(3, 3, rng);
      const Matrix J = svt(M, tau);
      const double base = svt_objective(J, M, tau);
      int worse = 0;
      for (int p = 0; p < 1000; ++p) {
        Matrix D(3, 3);
        for (Eigen::Index i = 0; i < D.size(); ++i) D(i) = 1e-3 * gauss(rng);
        worse += svt_objective(J + D, M, tau) >= base - 1e-15;
      }
      CHECK(worse == 1000);
    }
  }

  TEST_CASE("nonexpansive") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix A = oracle::random_gaussian(5, 4, rng);
      const Matrix B = A + 0.5 * oracle::random_gaussian(5, 4, rng);
      CHECK((svt(A, 0.7) - svt(B, 0.7)).norm() <= (A - B).norm() + 1e-12);
    }
  }
}

TEST_SUITE("shrinkage") {
  TEST_CASE("soft threshold examples") {
    const Vector v = (Vector(3) << 2, -0.5, 0).finished();
    CHECK((soft_threshold(v, 1.0) - (Vector(3) << 1, 0, 0).finished()).norm() == 0.0);
    CHECK((soft_threshold(v, 0.0) - v).norm() == 0.0);
    CHECK(soft_threshold(v, 2.0).norm() == 0.0);
    CHECK(soft_threshold((Vector(2) << -3, 3).finished(), 1.0)(0) == -2.0);
  }

  TEST_CASE("column l2,1 shrinkage") {
    Matrix M(2, 3);
    M << 0, 3, 0.3,
         2, 4, 0.4;
    const Matrix out = col_shrink_l21(M, 1.0);
    CHECK((out.col(0) - 0.5 * M.col(0)).norm() < 1e-15);
    CHECK((out.col(1) - 0.8 * M.col(1)).norm() < 1e-15);
    CHECK(out.col(2).norm() == 0.0);
    CHECK((col_shrink_l21(M, 0.0) - M).norm() == 0.0);
    CHECK_THROWS_AS(col_shrink_l21(M, -0.1), std::invalid_argument);
  }
}

TEST_SUITE("pca") {
  TEST_CASE("lossless on data spanning a p-dimensional affine subspace") {
    std::mt19937_64 rng(31);
    const Matrix basis = oracle::random_orthonormal(8, 3, rng);
    const Vector offset = oracle::random_gaussian(8, rng);
    const Matrix X = (basis * oracle::random_gaussian(3, 40, rng)).colwise() + offset;
    const PcaModel model = pca_fit(X, 3);
    CHECK((model.reconstruct(model.transform(X)) - X).norm() < 1e-8);
  }

  TEST_CASE("full dimension preserves pairwise distances") {
    std::mt19937_64 rng(37);
    const Matrix X = oracle::random_gaussian(6, 9, rng);
    const Matrix Z = pca_project(X, 6);
    double worst = 0.0;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        worst = std::max(worst, std::abs((X.col(i) - X.col(j)).norm() - (Z.col(i) - Z.col(j)).norm()));
    CHECK(worst < 1e-8);
  }

  TEST_CASE("captured variance matches an independent covariance eigendecomposition") {
    std::mt19937_64 rng(41);
    const Matrix X = oracle::random_gaussian(10, 50, rng);
    const PcaModel model = pca_fit(X, 3);
    const Vector ev = oracle::covariance_eigenvalues(X);
    CHECK(std::abs(model.variances.sum() - ev.head(3).sum()) < 1e-8);
    const Matrix Z = model.transform(X);
    const double projected = (Z.colwise() - Z.rowwise().mean()).squaredNorm() / 49.0;
    CHECK(std::abs(projected - ev.head(3).sum()) < 1e-8);
  }

  TEST_CASE("component signs are fixed by the largest entry") {
    std::mt19937_64 rng(43);
    const Matrix X = oracle::random_gaussian(5, 20, rng);
    const PcaModel a = pca_fit(X, 4);
    const PcaModel b = pca_fit(-X, 4);
    for (Eigen::Index j = 0; j < 4; ++j) {
      Eigen::Index arg = 0;
      a.components.col(j).cwiseAbs().maxCoeff(&arg);
      CHECK(a.components(arg, j) > 0.0);
    }
    CHECK((a.components - b.components).norm() < 1e-8);
  }

  TEST_CASE("component count out of range") {
    const Matrix X = Matrix::Random(4, 6);
    CHECK_THROWS_AS(pca_fit(X, 0), std::invalid_argument);
    CHECK_THROWS_AS(pca_fit(X, 5), std::invalid_argument);
    CHECK_NOTHROW(pca_fit(X, 4));
  }
}

TEST_SUITE("normalize_columns") {
  TEST_CASE("examples") {
    Matrix X(2, 2);
    X << 3, 1,
         4, 0;
    const Matrix out = normalize_columns(X);
    CHECK(out(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK((normalize_columns(out) - out).norm() < 1e-15);
  }

  TEST_CASE("zero column is named") {
    Matrix X = Matrix::Ones(3, 4);
    X.col(2).setZero();
    CHECK_THROWS_WITH_AS(normalize_columns(X), doctest::Contains("column 2"), std::invalid_argument);
  }
}
