#pragma once

#include "cass/evaluation.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cass::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNonConvergence = 3, kIo = 4 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "key = value" pairs; '#' starts a comment, blank lines are ignored.
using ConfigMap = std::map<std::string, std::string>;

/// Throws UsageError on a malformed line or duplicate key (message cites the line).
ConfigMap parse_config_text(std::string_view text);
/// Throws IoError when the file cannot be read.
ConfigMap read_config_file(const std::filesystem::path& path);

/// Splits "a, b ,c" into trimmed non-empty items.
std::vector<std::string> split_list(std::string_view text);

/// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// One evaluated (dataset, method, lambda, pca_dim) candidate.
struct GridEntry {
  std::string dataset;
  std::string method;
  double lambda = 0.0;
  int pca_dim = 0;  // 0: no projection
  std::vector<double> accuracies;
  double mean_accuracy = 0.0;
  double wall_seconds = 0.0;
  long iterations = 0;
  int nonconverged_points = 0;
};

struct BenchmarkOutcome {
  BenchmarkReport report;
  std::vector<GridEntry> grid;  // every candidate, in grid order
  ConfigMap effective;
  bool all_converged = true;
};

/// Runs the grid described by `config` (see README for keys). Progress lines go to `log`.
BenchmarkOutcome run_benchmark(const ConfigMap& config, std::ostream& log);

/// Deterministic CSV: effective config as '#' lines, then one row per grid cell.
std::string report_csv(const BenchmarkOutcome& outcome);
/// JSON report; wall times and the timestamp live under "metadata" only.
std::string report_json(const BenchmarkOutcome& outcome, const std::string& timestamp);

}  // namespace cass::cli
