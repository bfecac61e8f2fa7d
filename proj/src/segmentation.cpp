#include "cass/segmentation.hpp"

#include "cass/kmeans.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <thread>

namespace cass {

Method parse_method(std::string_view name) {
  if (name == "cass") return Method::cass;
  if (name == "ssc") return Method::ssc;
  if (name == "lrr") return Method::lrr;
  if (name == "lsr") return Method::lsr;
  if (name == "knn") return Method::knn;
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected cass, ssc, lrr, lsr or knn)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::cass: return "cass";
    case Method::ssc: return "ssc";
    case Method::lrr: return "lrr";
    case Method::lsr: return "lsr";
    case Method::knn: return "knn";
  }
  return "unknown";
}

void SegmentationConfig::validate(Eigen::Index n) const {
  if (k < 2) throw std::invalid_argument("segmentation: k must be >= 2");
  if (k > n) throw std::invalid_argument("segmentation: k = " + std::to_string(k) + " exceeds sample count " + std::to_string(n));
  if (!(lambda > 0.0)) throw std::invalid_argument("segmentation: lambda must be > 0");
  if (kmeans_restarts < 1) throw std::invalid_argument("segmentation: kmeans_restarts must be >= 1");
  if (workers < 1) throw std::invalid_argument("segmentation: workers must be >= 1");
  if (method == Method::knn && knn_neighbors < 1) throw std::invalid_argument("segmentation: knn_neighbors must be >= 1");
}

bool CoefficientMatrix::all_converged() const {
  return std::all_of(diagnostics.begin(), diagnostics.end(), [](const PointDiagnostics& d) { return d.converged; });
}

namespace {

Matrix drop_column(const Matrix& X, Eigen::Index i) {
  Matrix out(X.rows(), X.cols() - 1);
  out.leftCols(i) = X.leftCols(i);
  out.rightCols(X.cols() - 1 - i) = X.rightCols(X.cols() - 1 - i);
  return out;
}

void scatter_skipping(Matrix& W, Eigen::Index i, const Vector& w) {
  const Eigen::Index n = W.rows();
  W.col(i).head(i) = w.head(i);
  W(i, i) = 0.0;
  W.col(i).tail(n - 1 - i) = w.tail(n - 1 - i);
}

// Runs body(i) for i in [0, n) on `workers` threads with a static stride split.
// The first failure (lowest index) is rethrown.
template <class Body>
void parallel_points(Eigen::Index n, int workers, Body body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto run = [&](int t) {
    for (Eigen::Index i = t; i < n; i += workers) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers <= 1 || n <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!errors[static_cast<std::size_t>(i)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
    } catch (const std::exception& e) {
      throw std::runtime_error("coefficient_matrix: point " + std::to_string(i) + ": " + e.what());
    }
  }
}

void lsr_leave_one_out(const Matrix& X, double lambda, CoefficientMatrix& out) {
  // (G_{-i} + lambda I)^{-1} is the Schur complement of B = (G + lambda I)^{-1}:
  //   B_{-i,-i} - B_{-i,i} B_{i,-i} / B_ii.
  const Eigen::Index n = X.cols();
  Matrix G = X.transpose() * X;
  Matrix shifted = G;
  shifted.diagonal().array() += lambda;
  const Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) throw NumericalError("lsr: factorization failed");
  const Matrix B = llt.solve(Matrix::Identity(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector c = G.col(i);
    c(i) = 0.0;
    Vector w = B * c - B.col(i) * (B.row(i).dot(c) / B(i, i));
    w(i) = 0.0;
    out.W.col(i) = w;
    const Matrix dict_fit = X * w;
    out.diagnostics[static_cast<std::size_t>(i)] = {static_cast<int>(i), 0, true, (X.col(i) - dict_fit).norm(),
                                                    (X.col(i) - dict_fit).squaredNorm() + lambda * w.squaredNorm()};
  }
}

void knn_weights(const Matrix& X, int neighbors, CoefficientMatrix& out) {
  const Eigen::Index n = X.cols();
  Matrix dist(n, n);
  std::vector<double> pairwise;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) dist(i, j) = (X.col(i) - X.col(j)).norm();
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) pairwise.push_back(dist(i, j));
  std::nth_element(pairwise.begin(), pairwise.begin() + pairwise.size() / 2, pairwise.end());
  double sigma = pairwise[pairwise.size() / 2];
  if (sigma <= 0.0) sigma = 1.0;

  const Eigen::Index keep = std::min<Eigen::Index>(neighbors, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return dist(a, i) < dist(b, i); });
    for (Eigen::Index t = 0; t < keep; ++t) out.W(idx[t], i) = std::exp(-dist(idx[t], i) / sigma);
    out.diagnostics[static_cast<std::size_t>(i)].index = static_cast<int>(i);
  }
}

}  // namespace

CoefficientMatrix coefficient_matrix(const Matrix& X_in, const SegmentationConfig& config) {
  require_finite(X_in, "coefficient_matrix");
  const Eigen::Index n = X_in.cols();
  if (n < 2) throw std::invalid_argument("coefficient_matrix: need at least 2 samples");
  if (!(config.lambda > 0.0)) throw std::invalid_argument("coefficient_matrix: lambda must be > 0");
  const Matrix X = normalize_columns(X_in);

  CoefficientMatrix out;
  out.W = Matrix::Zero(n, n);

  switch (config.method) {
    case Method::cass: {
      AdmConfig adm = config.adm;
      adm.lambda = config.lambda;
      adm.validate();
      out.diagnostics.resize(static_cast<std::size_t>(n));
      parallel_points(n, config.workers, [&](Eigen::Index i) {
        const AdmResult r = solve_noisy(drop_column(X, i), X.col(i), adm);
        scatter_skipping(out.W, i, r.w);
        out.diagnostics[static_cast<std::size_t>(i)] = {static_cast<int>(i), r.iterations, r.converged,
                                                        r.final_residual, r.objective};
      });
      break;
    }
    case Method::ssc: {
      out.diagnostics.resize(static_cast<std::size_t>(n));
      parallel_points(n, config.workers, [&](Eigen::Index i) {
        const Matrix dict = drop_column(X, i);
        const SscResult r = solve_ssc(dict, X.col(i), config.lambda, config.ssc_tol, config.ssc_max_iter);
        scatter_skipping(out.W, i, r.w);
        out.diagnostics[static_cast<std::size_t>(i)] = {static_cast<int>(i), r.iterations, r.converged,
                                                        (X.col(i) - dict * r.w).norm(), r.objective};
      });
      break;
    }
    case Method::lsr: {
      out.diagnostics.resize(static_cast<std::size_t>(n));
      lsr_leave_one_out(X, config.lambda, out);
      break;
    }
    case Method::lrr: {
      const LrrResult r = solve_lrr(X, config.lambda, config.lrr_tol, config.lrr_max_iter);
      out.W = r.W;
      out.W.diagonal().setZero();
      out.diagnostics.push_back({-1, r.iterations, r.converged, max_abs(Matrix(X - X * r.W - r.E)), 0.0});
      break;
    }
    case Method::knn: {
      out.diagnostics.resize(static_cast<std::size_t>(n));
      knn_weights(X, config.knn_neighbors, out);
      break;
    }
  }
  return out;
}

AffinityMatrix affinity(const Matrix& W) {
  if (W.rows() != W.cols()) throw std::invalid_argument("affinity: coefficient matrix must be square");
  require_finite(W, "affinity");
  AffinityMatrix a{(W.cwiseAbs() + W.transpose().cwiseAbs()) / 2.0};
  a.A.diagonal().setZero();
  return a;
}

Labels spectral_cluster(const AffinityMatrix& affinity, int k, int restarts, std::uint64_t seed, int kmeans_max_iter) {
  const Matrix& A = affinity.A;
  require_finite(A, "spectral_cluster");
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("spectral_cluster: affinity must be square");
  if (k < 2 || k > n) throw std::invalid_argument("spectral_cluster: k must be in [2, n]");
  if (A != A.transpose()) throw std::invalid_argument("spectral_cluster: affinity is not symmetric");
  if ((A.array() < 0.0).any()) throw std::invalid_argument("spectral_cluster: affinity has negative entries");
  if (A.isZero(0.0)) throw std::invalid_argument("spectral_cluster: affinity is all zero");

  const Vector degree = A.rowwise().sum();
  Vector inv_sqrt(n);
  int isolated = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (degree(i) > 0.0) {
      inv_sqrt(i) = 1.0 / std::sqrt(degree(i));
    } else {
      inv_sqrt(i) = 0.0;
      ++isolated;
    }
  }
  if (isolated > 0) {
    std::cerr << "warning: spectral_cluster: " << isolated << " zero-degree node(s) treated as isolated\n";
  }

  Matrix laplacian = -(inv_sqrt.asDiagonal() * A * inv_sqrt.asDiagonal());
  laplacian.diagonal().array() += 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian);
  if (eig.info() != Eigen::Success) throw NumericalError("spectral_cluster: eigendecomposition failed");

  Matrix embedding = eig.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return kmeans(embedding, k, restarts, seed, kmeans_max_iter).assignment;
}

SegmentationResult segment(const Matrix& X, const SegmentationConfig& config) {
  require_finite(X, "segment");
  config.validate(X.cols());
  SegmentationResult result;
  result.coefficients = coefficient_matrix(X, config);
  const AffinityMatrix a = affinity(result.coefficients.W);
#ifndef NDEBUG
  if (a.A != a.A.transpose() || (a.A.array() < 0.0).any() || !a.A.diagonal().isZero(0.0)) {
    throw std::logic_error("segment: affinity invariants violated");
  }
#endif
  result.labels = spectral_cluster(a, config.k, config.kmeans_restarts, config.seed, config.kmeans_max_iter);
  return result;
}

}  // namespace cass
