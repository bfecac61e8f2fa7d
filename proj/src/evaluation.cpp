#include "cass/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cass {

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const int n = static_cast<int>(weight.size());
  if (n == 0) return {};
  double top = 0.0;
  for (const auto& row : weight) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("max_weight_assignment: matrix must be square");
    for (double v : row) top = std::max(top, v);
  }

  // Shortest augmenting path with potentials on cost = top - weight (1-indexed).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = (top - weight[r - 1][c - 1]) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("accuracy: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  }
  if (predicted.empty()) throw std::invalid_argument("accuracy: empty label vectors");
  int kp = 0, kt = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || truth[i] < 0) throw std::invalid_argument("accuracy: labels must be nonnegative");
    kp = std::max(kp, predicted[i] + 1);
    kt = std::max(kt, truth[i] + 1);
  }
  const int k = std::max(kp, kt);
  std::vector<std::vector<double>> confusion(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < predicted.size(); ++i) confusion[predicted[i]][truth[i]] += 1.0;
  const auto assignment = max_weight_assignment(confusion);
  double hits = 0.0;
  for (int p = 0; p < k; ++p) hits += confusion[p][assignment[p]];
  return hits / static_cast<double>(predicted.size());
}

ErrorStats error_stats(const std::vector<double>& errors) {
  if (errors.empty()) throw std::invalid_argument("error_stats: empty list");
  ErrorStats s;
  s.max = -std::numeric_limits<double>::infinity();
  // Welford.
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (double e : errors) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("error_stats: error rate outside [0, 1]");
    s.max = std::max(s.max, e);
    ++count;
    const double delta = e - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (e - mean);
  }
  s.mean = mean;
  s.std = count > 1 ? std::sqrt(std::max(0.0, m2) / static_cast<double>(count - 1)) : 0.0;
  return s;
}

const ReportRow* BenchmarkReport::find(const std::string& dataset, const std::string& method) const {
  for (const auto& row : rows)
    if (row.dataset == dataset && row.method == method) return &row;
  return nullptr;
}

std::size_t BenchmarkReport::populated() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.accuracy.has_value(); }));
}

BenchmarkReport benchmark_report(const std::vector<CellResult>& results, std::vector<std::string> dataset_order,
                                 std::vector<std::string> method_order) {
  auto add_unique = [](std::vector<std::string>& list, const std::string& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
  };
  for (const auto& r : results) {
    add_unique(dataset_order, r.dataset);
    add_unique(method_order, r.method);
  }

  BenchmarkReport report;
  report.datasets = dataset_order;
  report.methods = method_order;
  report.metadata["std_convention"] = kStdConvention;
  report.metadata["error_definition"] = "1 - accuracy";
  for (const auto& dataset : dataset_order) {
    for (const auto& method : method_order) {
      ReportRow row;
      row.dataset = dataset;
      row.method = method;
      const auto it = std::find_if(results.begin(), results.end(), [&](const CellResult& r) {
        return r.dataset == dataset && r.method == method && !r.accuracies.empty();
      });
      if (it != results.end()) {
        std::vector<double> errors;
        double sum = 0.0;
        for (double acc : it->accuracies) {
          sum += acc;
          errors.push_back(1.0 - acc);
        }
        row.accuracy = sum / static_cast<double>(it->accuracies.size());
        row.error = 1.0 - *row.accuracy;
        row.error_stats = error_stats(errors);
        row.lambda = it->lambda;
        row.pca_dim = it->pca_dim;
        row.replicates = static_cast<int>(it->accuracies.size());
        row.wall_seconds = it->wall_seconds;
        row.iterations = it->iterations;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace cass
