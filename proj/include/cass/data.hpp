#pragma once

#include "cass/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace cass {

/// Samples as columns plus ground-truth labels contiguous from 0.
struct LabeledData {
  Matrix X;
  std::vector<int> labels;
  std::string source;

  int num_classes() const;
  void validate() const;
};

struct SyntheticSpec {
  int k = 3;
  std::vector<int> subspace_dims;        // one per subspace
  int ambient_dim = 30;
  std::vector<int> points_per_subspace;  // one per subspace
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  /// Place bases in disjoint coordinate blocks, then rotate the ambient space
  /// once. Requires sum of dims <= ambient_dim. Otherwise bases are drawn
  /// independently at random.
  bool independent = true;
  /// Coefficients are sqrt(c)*g_shared + sqrt(1-c)*g_point, so points of one
  /// subspace have expected coefficient correlation c in [0, 1).
  double within_correlation = 0.0;

  /// Convenience for k equal subspaces.
  static SyntheticSpec uniform(int k, int dim, int ambient, int per, double sigma, std::uint64_t seed);
  void validate() const;
};

/// Points B_i c + noise, columns normalized last. Deterministic per seed.
LabeledData gen_synthetic(const SyntheticSpec& spec);

class IdxError : public std::runtime_error {
 public:
  enum class Kind { io, wrong_magic, truncated, count_mismatch };
  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// MNIST-style IDX pair: pixels scaled by 1/255, one flattened image per column.
LabeledData load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

class CsvError : public std::runtime_error {
 public:
  /// row and column are 1-based positions in the file (0 when not applicable).
  CsvError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what), row_(row), column_(column) {}
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

enum class CsvOrientation {
  samples_as_rows,     // default: each row is one sample, transposed into a column
  samples_as_columns,
};

/// Comma-separated numeric file. Blank lines and lines starting with '#' are
/// skipped; with `header` the first remaining line is skipped too.
Matrix load_csv(const std::filesystem::path& path, CsvOrientation orientation = CsvOrientation::samples_as_rows,
                bool header = false);

/// One integer label per line, or "index,label" rows; an optional
/// non-numeric header line and '#' comment lines are skipped.
std::vector<int> load_labels_csv(const std::filesystem::path& path);

/// Maps integer labels to their rank among the distinct values (0..k-1).
std::vector<int> relabel_contiguous(const std::vector<int>& labels);

/// Keeps the first m samples of every class, preserving original order.
LabeledData first_m_per_class(const LabeledData& data, int m);

/// PCA dimension used by the motion protocol.
inline constexpr int kMotionPcaDim = 12;
/// PCA dimension used by the face protocol: 6 per subject.
inline constexpr int face_pca_dim(int classes) { return 6 * classes; }

}  // namespace cass
