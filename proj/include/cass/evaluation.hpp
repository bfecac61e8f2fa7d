#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cass {

/// Maximum-weight assignment on a square matrix of nonnegative weights
/// (rows -> columns). Returns the column chosen for each row.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight);

/// Best matching rate between predicted and true labels, over injective
/// relabelings of the predicted clusters. Labels must be >= 0.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Error statistics over per-dataset error rates. `std` is the sample
/// standard deviation (divisor n - 1; 0 for a single value).
struct ErrorStats {
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

inline constexpr const char* kStdConvention = "sample (n-1)";

ErrorStats error_stats(const std::vector<double>& errors);

/// Outcome of one (dataset, method) cell after parameter selection.
struct CellResult {
  std::string dataset;
  std::string method;
  std::vector<double> accuracies;  // one per replicate of the dataset
  std::optional<double> lambda;
  std::optional<int> pca_dim;
  double wall_seconds = 0.0;
  long iterations = 0;
};

struct ReportRow {
  std::string dataset;
  std::string method;
  std::optional<double> accuracy;  // mean over replicates; absent if the cell was not run
  std::optional<double> error;     // 1 - accuracy
  std::optional<ErrorStats> error_stats;
  std::optional<double> lambda;
  std::optional<int> pca_dim;
  int replicates = 0;
  double wall_seconds = 0.0;
  long iterations = 0;
};

struct BenchmarkReport {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<ReportRow> rows;  // datasets x methods, dataset-major
  std::map<std::string, std::string> metadata;

  const ReportRow* find(const std::string& dataset, const std::string& method) const;
  std::size_t populated() const;
};

/// Lays results onto the datasets x methods grid (order of first appearance
/// unless explicit orders are given). Cells with no result stay absent.
BenchmarkReport benchmark_report(const std::vector<CellResult>& results,
                                 std::vector<std::string> dataset_order = {},
                                 std::vector<std::string> method_order = {});

}  // namespace cass
