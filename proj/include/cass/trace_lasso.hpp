#pragma once

#include "cass/numerics.hpp"

#include <optional>

namespace cass {

/// Parameters of the alternating direction solver for
///   min_w 0.5*||y - X w||_2^2 + lambda*||X Diag(w)||_*.
struct AdmConfig {
  double lambda = 0.1;
  // mu0 = 0.1, rho = 1.1 meets the stopping test ~1e-2 away from the optimum.
  double mu0 = 1e-3;
  double rho = 1.05;
  double mu_max = 1e10;
  double eps = 1e-6;
  int max_iter = 2000;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

struct AdmResult {
  Vector w;
  Matrix J;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;  // ||J - X Diag(w)||_inf at exit
  double objective = 0.0;       // evaluated at w on the unit-column dictionary
};

/// Raised by solve_exact when y is not reproduced by the dictionary.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ||X Diag(w)||_*. The l2 <= value <= l1 sandwich only holds for unit columns;
/// columns are used as given.
double trace_lasso_norm(const Matrix& X, const Vector& w);

/// 0.5*||y - X w||^2 + lambda*||X Diag(w)||_*, with X used as given.
double trace_lasso_objective(const Matrix& X, const Vector& y, const Vector& w, double lambda);

/// Solves the l2-loss trace Lasso regression. X's columns are normalized to
/// unit length first (throws on a zero column); w refers to the normalized
/// dictionary. Running out of iterations sets converged = false, it does not
/// throw. `warm_start` seeds w (and J = X Diag(w)); default is zero.
AdmResult solve_noisy(const Matrix& X, const Vector& y, const AdmConfig& config,
                      const std::optional<Vector>& warm_start = std::nullopt);

/// Approximates min ||X Diag(w)||_* s.t. y = X w by a decreasing lambda
/// schedule lambda * 10^-k, k = 0..continuation_steps-1, warm-starting each
/// stage. Throws InfeasibleError if ||y - X w|| > 1e-4 * ||y|| at the end.
Vector solve_exact(const Matrix& X, const Vector& y, const AdmConfig& config, int continuation_steps = 4);

}  // namespace cass
