#pragma once

#include "cass/numerics.hpp"

#include <cstdint>
#include <vector>

namespace cass {

struct KMeansResult {
  std::vector<int> assignment;  // relabeled by first appearance in row order
  Matrix centers;               // k x dim
  double inertia = 0.0;
};

/// Seeded k-means++ / Lloyd over the rows of `points`, best of `restarts` by
/// inertia (ties: lexicographically smallest assignment). Seeding draws over
/// a canonical row order built from permutation- and rotation-invariant keys,
/// so reordering the rows reorders the result instead of changing it.
KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed, int max_iter = 300);

}  // namespace cass
