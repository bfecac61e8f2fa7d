#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cass {

/// Dense real matrix; column-major (Eigen default). Columns are samples.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Centralized numerical tolerances.
namespace tol {
inline constexpr double kFactorization = 1e-8;   // relative reconstruction
inline constexpr double kOrthonormality = 1e-10;
inline constexpr double kUnitNorm = 1e-12;
}  // namespace tol

/// Raised when a dense factorization fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thin SVD factors, r = min(rows, cols).
struct SvdFactors {
  Matrix U;                // d x r, orthonormal columns
  Vector singular_values;  // r, nonincreasing, >= 0
  Matrix V;                // n x r, orthonormal columns

  Matrix reconstruct() const;
};

/// Throws std::invalid_argument if M is empty or holds NaN/Inf.
void require_finite(const Matrix& M, const char* what);

SvdFactors svd(const Matrix& M);

double nuclear_norm(const Matrix& M);

/// Singular value thresholding: argmin_J tau*||J||_* + 0.5*||J - M||_F^2.
Matrix svt(const Matrix& M, double tau);

/// sign(v_i) * max(|v_i| - tau, 0).
Vector soft_threshold(const Vector& v, double tau);

/// Proximal operator of tau*||.||_{2,1}; shrinks each column toward zero.
Matrix col_shrink_l21(const Matrix& M, double tau);

/// Principal directions of mean-centered data. `components` is d x p with
/// orthonormal columns ordered by decreasing variance; each column's
/// largest-magnitude entry is positive.
struct PcaModel {
  Vector mean;
  Matrix components;
  Vector variances;  // sample covariance eigenvalues (divisor n - 1, or 1 if n == 1)

  Matrix transform(const Matrix& X) const;
  Matrix reconstruct(const Matrix& Z) const;
};

PcaModel pca_fit(const Matrix& X, Eigen::Index p);

/// p x n coordinates of X in its top-p principal directions.
Matrix pca_project(const Matrix& X, Eigen::Index p);

/// Scales each column to unit l2 norm. Throws on a zero column, naming it.
Matrix normalize_columns(const Matrix& X);

/// max_ij |A_ij|; 0 for an empty matrix.
inline double max_abs(const Matrix& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace cass
