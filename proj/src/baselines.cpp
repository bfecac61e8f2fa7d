#include "cass/baselines.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace cass {

namespace {

void check_regression_inputs(const Matrix& X, const Vector& y, double lambda, const char* what) {
  require_finite(X, what);
  if (y.size() != X.rows()) {
    throw std::invalid_argument(std::string(what) + ": y length " + std::to_string(y.size()) +
                                " does not match X rows " + std::to_string(X.rows()));
  }
  if (!y.allFinite()) throw std::invalid_argument(std::string(what) + ": y contains NaN or Inf");
  if (!(lambda > 0.0)) throw std::invalid_argument(std::string(what) + ": lambda must be > 0");
}

double lasso_objective(const Matrix& X, const Vector& y, const Vector& w, double lambda) {
  return (y - X * w).squaredNorm() + lambda * w.lpNorm<1>();
}

}  // namespace

Vector solve_lsr(const Matrix& X, const Vector& y, double lambda) {
  check_regression_inputs(X, y, lambda, "solve_lsr");
  Matrix G = X.transpose() * X;
  G.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_lsr: Cholesky factorization failed");
  return llt.solve(X.transpose() * y);
}

SscResult solve_ssc(const Matrix& X, const Vector& y, double lambda, double tol, int max_iter) {
  check_regression_inputs(X, y, lambda, "solve_ssc");
  if (max_iter < 1) throw std::invalid_argument("solve_ssc: max_iter must be >= 1");

  const Eigen::Index n = X.cols();
  const Matrix G = X.transpose() * X;
  const Vector Xty = X.transpose() * y;
  const double sigma_max = svd(X).singular_values(0);

  SscResult r;
  r.w = Vector::Zero(n);
  r.objective = lasso_objective(X, y, r.w, lambda);
  if (sigma_max == 0.0) {
    r.converged = true;
    return r;
  }
  const double step = 1.0 / (2.0 * sigma_max * sigma_max);
  auto gradient = [&](const Vector& v) -> Vector { return 2.0 * (G * v - Xty); };
  auto prox_step = [&](const Vector& v) { return soft_threshold(v - step * gradient(v), lambda * step); };

  Vector x = r.w;
  Vector extrapolated = x;
  double t = 1.0;
  for (int k = 0; k < max_iter; ++k) {
    const Vector z = prox_step(extrapolated);
    const double fz = lasso_objective(X, y, z, lambda);
    const double f_prev = r.objective;
    const Vector x_prev = x;
    if (fz <= f_prev) {
      x = z;
      r.objective = fz;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    extrapolated = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    r.iterations = k + 1;
    r.objective_history.push_back(r.objective);

    if (f_prev - r.objective <= tol * std::max(1.0, r.objective)) {
      const double mapping = max_abs(Vector(x - prox_step(x))) / step;
      if (mapping <= 1e-6) {
        r.converged = true;
        break;
      }
      if (fz > f_prev) {
        // Momentum overshoot: restart from the accepted iterate.
        extrapolated = x;
        t = 1.0;
      }
    }
  }
  r.w = x;
  return r;
}

LrrResult solve_lrr(const Matrix& X, double lambda, double tol, int max_iter, const LrrSchedule& schedule) {
  require_finite(X, "solve_lrr");
  if (!(lambda > 0.0)) throw std::invalid_argument("solve_lrr: lambda must be > 0");
  if (X.isZero(0.0)) throw std::invalid_argument("solve_lrr: X is the zero matrix");
  if (!(schedule.mu0 > 0.0) || !(schedule.rho > 1.0) || !(schedule.mu_max >= schedule.mu0)) {
    throw std::invalid_argument("solve_lrr: invalid penalty schedule");
  }

  const Eigen::Index d = X.rows();
  const Eigen::Index n = X.cols();
  const Matrix XtX = X.transpose() * X;
  Matrix system = XtX;
  system.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_lrr: factorization of I + X^T X failed");

  LrrResult r;
  r.W = Matrix::Zero(n, n);
  r.E = Matrix::Zero(d, n);
  Matrix J = Matrix::Zero(n, n);
  Matrix Y1 = Matrix::Zero(d, n);
  Matrix Y2 = Matrix::Zero(n, n);
  double mu = schedule.mu0;

  for (int k = 0; k < max_iter; ++k) {
    J = svt(r.W + Y2 / mu, 1.0 / mu);
    r.W = llt.solve(XtX - X.transpose() * r.E + J + (X.transpose() * Y1 - Y2) / mu);
    r.E = col_shrink_l21(X - X * r.W + Y1 / mu, lambda / mu);

    const Matrix fit_gap = X - X * r.W - r.E;
    const Matrix split_gap = r.W - J;
    Y1 += mu * fit_gap;
    Y2 += mu * split_gap;
    mu = std::min(schedule.rho * mu, schedule.mu_max);
    r.iterations = k + 1;
    if (max_abs(fit_gap) <= tol && max_abs(split_gap) <= tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace cass
