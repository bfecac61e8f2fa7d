#pragma once

#include "cass/numerics.hpp"

#include <vector>

namespace cass {

/// Ridge regression min ||y - Xw||^2 + lambda*||w||^2, solved in closed form.
Vector solve_lsr(const Matrix& X, const Vector& y, double lambda);

struct SscResult {
  Vector w;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::vector<double> objective_history;  // accepted objective after each iteration
};

/// Lasso min ||y - Xw||^2 + lambda*||w||_1 by monotone accelerated proximal
/// gradient (step 1/(2*sigma_max(X)^2)). Stops once an iteration lowers the
/// objective by at most tol*max(1, F) and the proximal-gradient residual is
/// below 1e-6; otherwise returns the best iterate with converged = false.
SscResult solve_ssc(const Matrix& X, const Vector& y, double lambda, double tol = 1e-12, int max_iter = 100000);

struct LrrResult {
  Matrix W;  // n x n
  Matrix E;  // d x n
  int iterations = 0;
  bool converged = false;
};

struct LrrSchedule {
  double mu0 = 1e-3;
  double rho = 1.05;
  double mu_max = 1e10;
};

/// min ||W||_* + lambda*||E||_{2,1} s.t. X = XW + E, by inexact ALM with the
/// split W = J. Converged means both constraint residuals are <= tol in the
/// max-abs norm.
LrrResult solve_lrr(const Matrix& X, double lambda, double tol = 1e-8, int max_iter = 5000,
                    const LrrSchedule& schedule = {});

}  // namespace cass
