#include "cass/trace_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cass {

void AdmConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("AdmConfig: " + msg); };
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(mu0 > 0.0)) fail("mu0 must be > 0");
  if (!(rho > 1.0)) fail("rho must be > 1");
  if (!(mu_max >= mu0)) fail("mu_max must be >= mu0");
  if (!(eps > 0.0)) fail("eps must be > 0");
  if (max_iter < 1) fail("max_iter must be >= 1");
}

namespace {

void check_dims(const Matrix& X, const Vector& w, const char* what) {
  if (X.cols() != w.size()) {
    throw std::invalid_argument(std::string(what) + ": X has " + std::to_string(X.cols()) +
                                " columns but w has length " + std::to_string(w.size()));
  }
}

// Applies (X^T X + mu I)^{-1} using a thin SVD of X computed once:
//   V diag(1/(s^2+mu)) V^T b + (b - V V^T b)/mu.
class ShiftedGramInverse {
 public:
  explicit ShiftedGramInverse(const Matrix& X) {
    const SvdFactors f = svd(X);
    V_ = f.V;
    s2_ = f.singular_values.array().square();
  }

  Vector apply(const Vector& b, double mu) const {
    const Vector coeffs = V_.transpose() * b;
    const Vector scaled = coeffs.array() / (s2_.array() + mu);
    return V_ * scaled + (b - V_ * coeffs) / mu;
  }

 private:
  Matrix V_;
  Vector s2_;
};

}  // namespace

double trace_lasso_norm(const Matrix& X, const Vector& w) {
  check_dims(X, w, "trace_lasso_norm");
  return nuclear_norm(X * w.asDiagonal());
}

double trace_lasso_objective(const Matrix& X, const Vector& y, const Vector& w, double lambda) {
  check_dims(X, w, "trace_lasso_objective");
  return 0.5 * (y - X * w).squaredNorm() + lambda * trace_lasso_norm(X, w);
}

AdmResult solve_noisy(const Matrix& X, const Vector& y, const AdmConfig& config,
                      const std::optional<Vector>& warm_start) {
  config.validate();
  const Matrix Xn = normalize_columns(X);
  if (y.size() != Xn.rows()) {
    throw std::invalid_argument("solve_noisy: y has length " + std::to_string(y.size()) + ", expected " +
                                std::to_string(Xn.rows()));
  }
  if (!y.allFinite()) throw std::invalid_argument("solve_noisy: y contains NaN or Inf");

  const Eigen::Index n = Xn.cols();
  const ShiftedGramInverse gram_inverse(Xn);
  const Vector Xty = Xn.transpose() * y;

  AdmResult r;
  r.w = Vector::Zero(n);
  if (warm_start) {
    check_dims(Xn, *warm_start, "solve_noisy warm start");
    r.w = *warm_start;
  }
  r.J = Xn * r.w.asDiagonal();
  Matrix Y = Matrix::Zero(Xn.rows(), n);
  double mu = config.mu0;

  for (int t = 0; t < config.max_iter; ++t) {
    Matrix J_next = svt(Xn * r.w.asDiagonal() - Y / mu, config.lambda / mu);

    const Matrix YmuJ = Y + mu * J_next;
    const Vector rhs = Xty + Xn.cwiseProduct(YmuJ).colwise().sum().transpose();
    Vector w_next = gram_inverse.apply(rhs, mu);

    const Matrix gap = J_next - Xn * w_next.asDiagonal();
    Y += mu * gap;
    mu = std::min(config.rho * mu, config.mu_max);

    const double dJ = max_abs(Matrix(J_next - r.J));
    const double dw = max_abs(Vector(w_next - r.w));
    r.final_residual = max_abs(gap);
    r.J = std::move(J_next);
    r.w = std::move(w_next);
    r.iterations = t + 1;
    if (dJ <= config.eps && dw <= config.eps && r.final_residual <= config.eps) {
      r.converged = true;
      break;
    }
  }
  r.objective = trace_lasso_objective(Xn, y, r.w, config.lambda);
  return r;
}

Vector solve_exact(const Matrix& X, const Vector& y, const AdmConfig& config, int continuation_steps) {
  config.validate();
  if (continuation_steps < 1) throw std::invalid_argument("solve_exact: continuation_steps must be >= 1");
  const Matrix Xn = normalize_columns(X);
  if (y.size() != Xn.rows()) throw std::invalid_argument("solve_exact: y length does not match X rows");
  const double y_norm = y.norm();
  if (y_norm == 0.0) return Vector::Zero(Xn.cols());

  AdmConfig stage = config;
  std::optional<Vector> w;
  for (int k = 0; k < continuation_steps; ++k) {
    stage.lambda = config.lambda * std::pow(10.0, -k);
    w = solve_noisy(Xn, y, stage, w).w;
  }
  const double residual = (y - Xn * *w).norm();
  if (residual > 1e-4 * y_norm) {
    throw InfeasibleError("solve_exact: residual " + std::to_string(residual) +
                          " exceeds 1e-4 * ||y||; y appears to lie outside span(X)");
  }
  return *w;
}

}  // namespace cass
