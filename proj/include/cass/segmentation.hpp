#pragma once

#include "cass/baselines.hpp"
#include "cass/trace_lasso.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cass {

enum class Method { cass, ssc, lrr, lsr, knn };

/// Parses "cass", "ssc", "lrr", "lsr" or "knn"; throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);
std::string to_string(Method method);

using Labels = std::vector<int>;

struct SegmentationConfig {
  Method method = Method::cass;
  int k = 2;
  double lambda = 0.1;  // shared by every point; meaning depends on the method

  AdmConfig adm;  // iteration controls for cass (adm.lambda is overridden by lambda)
  double ssc_tol = 1e-12;
  int ssc_max_iter = 100000;
  double lrr_tol = 1e-8;
  int lrr_max_iter = 5000;
  int knn_neighbors = 6;

  int kmeans_restarts = 50;
  int kmeans_max_iter = 300;
  std::uint64_t seed = 0;
  int workers = 1;

  void validate(Eigen::Index n) const;
};

struct PointDiagnostics {
  int index = 0;
  int iterations = 0;
  bool converged = true;
  double residual = 0.0;   // solver-specific: ADM constraint gap, or ||y - Xw||
  double objective = 0.0;
};

/// n x n; column i holds the representation of sample i, and W(i, i) == 0.
struct CoefficientMatrix {
  Matrix W;
  std::vector<PointDiagnostics> diagnostics;  // one per point (one total for lrr)

  bool all_converged() const;
};

/// Symmetric, nonnegative, zero diagonal.
struct AffinityMatrix {
  Matrix A;
};

/// Leave-one-out coefficients on the unit-normalized columns of X. Per-point
/// problems run on `config.workers` threads; the output does not depend on it.
CoefficientMatrix coefficient_matrix(const Matrix& X, const SegmentationConfig& config);

/// (|W| + |W^T|) / 2.
AffinityMatrix affinity(const Matrix& W);

/// Normalized spectral clustering: bottom-k eigenvectors of
/// I - D^{-1/2} A D^{-1/2}, rows scaled to unit length, then seeded k-means.
/// Zero-degree nodes get a zero embedding row and a warning on stderr.
Labels spectral_cluster(const AffinityMatrix& affinity, int k, int restarts, std::uint64_t seed,
                        int kmeans_max_iter = 300);

struct SegmentationResult {
  Labels labels;
  CoefficientMatrix coefficients;
};

SegmentationResult segment(const Matrix& X, const SegmentationConfig& config);

}  // namespace cass
