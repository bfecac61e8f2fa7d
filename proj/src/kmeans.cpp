#include "cass/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cass {

namespace {

std::vector<int> first_appearance_labels(const std::vector<int>& raw, int k) {
  std::vector<int> remap(k, -1);
  int next = 0;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (remap[raw[i]] < 0) remap[raw[i]] = next++;
    out[i] = remap[raw[i]];
  }
  return out;
}

// Rows sorted by sum of squared distances to all rows, then by norm.
std::vector<Eigen::Index> canonical_order(const Matrix& points) {
  const Eigen::Index n = points.rows();
  const Vector sq = points.rowwise().squaredNorm();
  const Eigen::RowVectorXd total = points.colwise().sum();
  const double sq_total = sq.sum();
  std::vector<double> key(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    key[i] = static_cast<double>(n) * sq(i) - 2.0 * points.row(i).dot(total) + sq_total;
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return sq(a) < sq(b);
  });
  return order;
}

struct Run {
  std::vector<int> assignment;
  Matrix centers;
  double inertia;
};

Run lloyd(const Matrix& points, int k, const std::vector<Eigen::Index>& order, std::mt19937_64& rng,
          int max_iter) {
  const Eigen::Index n = points.rows();
  Matrix centers(k, points.cols());

  // k-means++ seeding over the canonical order.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto first = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n));
  centers.row(0) = points.row(order[std::min(first, n - 1)]);
  Vector nearest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = order[n - 1];
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (Eigen::Index pos = 0; pos < n; ++pos) {
        acc += nearest(order[pos]);
        if (acc >= target && nearest(order[pos]) > 0.0) {
          pick = order[pos];
          break;
        }
      }
    } else {
      pick = order[static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n)) % n];
    }
    centers.row(c) = points.row(pick);
    nearest = nearest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(n, -1);
  Vector dist(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dc = (points.row(i) - centers.row(c)).squaredNorm();
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      dist(i) = best_d;
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }

    std::vector<int> counts(k, 0);
    for (int a : assign) ++counts[a];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      // Empty cluster: take the point farthest from its center, canonical order breaking ties.
      Eigen::Index far = -1;
      for (Eigen::Index pos = 0; pos < n; ++pos) {
        const Eigen::Index i = order[pos];
        if (counts[assign[i]] > 1 && (far < 0 || dist(i) > dist(far))) far = i;
      }
      if (far < 0) break;
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      dist(far) = 0.0;
      changed = true;
    }

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(assign[i]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) /= static_cast<double>(counts[c]);
    }
    if (!changed) break;
  }

  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) inertia += (points.row(i) - centers.row(assign[i])).squaredNorm();
  return {std::move(assign), std::move(centers), inertia};
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed, int max_iter) {
  require_finite(points, "kmeans");
  if (k < 1 || k > points.rows()) {
    throw std::invalid_argument("kmeans: k must be in [1, " + std::to_string(points.rows()) + "]");
  }
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  const auto order = canonical_order(points);
  std::mt19937_64 rng(seed);
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    Run run = lloyd(points, k, order, rng, max_iter);
    std::vector<int> labels = first_appearance_labels(run.assignment, k);
    const double scale = std::max(1.0, run.inertia);
    const bool better = !have || run.inertia < best.inertia - 1e-12 * scale ||
                        (std::abs(run.inertia - best.inertia) <= 1e-12 * scale && labels < best.assignment);
    if (better) {
      // Reorder centers to match the relabeled assignment.
      Matrix centers = Matrix::Zero(k, points.cols());
      for (std::size_t i = 0; i < labels.size(); ++i) centers.row(labels[i]) = run.centers.row(run.assignment[i]);
      best = {std::move(labels), std::move(centers), run.inertia};
      have = true;
    }
  }
  return best;
}

}  // namespace cass
