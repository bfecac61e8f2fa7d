#include "cass/numerics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace cass {

Matrix SvdFactors::reconstruct() const {
  return U * singular_values.asDiagonal() * V.transpose();
}

void require_finite(const Matrix& M, const char* what) {
  if (M.rows() < 1 || M.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": matrix must have at least one row and one column");
  }
  if (!M.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": matrix contains NaN or Inf");
  }
}

namespace {

// LAPACK divide-and-conquer SVD, falling back to the QR-iteration driver when
// dgesdd reports non-convergence. Eigen's BDCSVD is avoided: the 3.4.0 release
// reads out of bounds during deflation on some inputs.
bool lapack_svd(Matrix A, Vector& s, Matrix* U, Matrix* Vt) {
  const auto m = static_cast<lapack_int>(A.rows());
  const auto n = static_cast<lapack_int>(A.cols());
  const lapack_int k = std::min(m, n);
  s.resize(k);
  const char job = U ? 'S' : 'N';
  if (U) {
    U->resize(m, k);
    Vt->resize(k, n);
  }
  double* u = U ? U->data() : nullptr;
  double* vt = U ? Vt->data() : nullptr;
  const lapack_int ldu = m;
  const lapack_int ldvt = U ? k : 1;
  Matrix backup = A;
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, job, m, n, A.data(), m, s.data(), u, ldu, vt, ldvt);
  if (info > 0) {
    Vector superb(std::max<lapack_int>(k - 1, 1));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, job, job, m, n, backup.data(), m, s.data(), u, ldu, vt, ldvt,
                          superb.data());
  }
  if (info != 0) return false;
  return s.allFinite() && (!U || (U->allFinite() && Vt->allFinite()));
}

}  // namespace

SvdFactors svd(const Matrix& M) {
  require_finite(M, "svd");
  SvdFactors f;
  Matrix Vt;
  if (!lapack_svd(M, f.singular_values, &f.U, &Vt)) {
    throw NumericalError("svd: factorization did not converge");
  }
  f.V = Vt.transpose();
  return f;
}

double nuclear_norm(const Matrix& M) {
  require_finite(M, "nuclear_norm");
  Vector s;
  if (!lapack_svd(M, s, nullptr, nullptr)) throw NumericalError("nuclear_norm: singular values did not converge");
  return s.sum();
}

Matrix svt(const Matrix& M, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("svt: tau must be >= 0");
  const SvdFactors f = svd(M);
  Eigen::Index keep = 0;
  while (keep < f.singular_values.size() && f.singular_values(keep) > tau) ++keep;
  if (keep == 0) return Matrix::Zero(M.rows(), M.cols());
  const Vector shrunk = f.singular_values.head(keep).array() - tau;
  return f.U.leftCols(keep) * shrunk.asDiagonal() * f.V.leftCols(keep).transpose();
}

Vector soft_threshold(const Vector& v, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("soft_threshold: tau must be >= 0");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i)) - tau;
    out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
  }
  return out;
}

Matrix col_shrink_l21(const Matrix& M, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("col_shrink_l21: tau must be >= 0");
  Matrix out = M;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double norm = M.col(j).norm();
    if (norm <= tau) {
      out.col(j).setZero();
    } else {
      out.col(j) *= 1.0 - tau / norm;
    }
  }
  return out;
}

Matrix PcaModel::transform(const Matrix& X) const {
  return components.transpose() * (X.colwise() - mean);
}

Matrix PcaModel::reconstruct(const Matrix& Z) const {
  return (components * Z).colwise() + mean;
}

PcaModel pca_fit(const Matrix& X, Eigen::Index p) {
  require_finite(X, "pca");
  const Eigen::Index limit = std::min(X.rows(), X.cols());
  if (p < 1 || p > limit) {
    throw std::invalid_argument("pca: component count " + std::to_string(p) + " outside [1, " +
                                std::to_string(limit) + "]");
  }
  PcaModel model;
  model.mean = X.rowwise().mean();
  const Matrix centered = X.colwise() - model.mean;
  // Left singular vectors of the centered data are the covariance eigenvectors.
  const SvdFactors f = svd(centered);
  model.components = f.U.leftCols(p);
  const double denom = X.cols() > 1 ? static_cast<double>(X.cols() - 1) : 1.0;
  model.variances = f.singular_values.head(p).array().square() / denom;
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index arg = 0;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, j) < 0.0) model.components.col(j) *= -1.0;
  }
  return model;
}

Matrix pca_project(const Matrix& X, Eigen::Index p) { return pca_fit(X, p).transform(X); }

Matrix normalize_columns(const Matrix& X) {
  require_finite(X, "normalize_columns");
  Matrix out = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double norm = X.col(j).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("normalize_columns: column " + std::to_string(j) + " is zero");
    }
    out.col(j) /= norm;
  }
  return out;
}

}  // namespace cass
