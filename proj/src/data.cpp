#include "cass/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>

namespace cass {

int LabeledData::num_classes() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

void LabeledData::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != X.cols()) {
    throw std::invalid_argument("LabeledData: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(X.cols()) + " samples");
  }
  if (relabel_contiguous(labels) != labels) {
    throw std::invalid_argument("LabeledData: labels must be contiguous from 0");
  }
}

SyntheticSpec SyntheticSpec::uniform(int k, int dim, int ambient, int per, double sigma, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.k = k;
  spec.subspace_dims.assign(static_cast<std::size_t>(std::max(k, 0)), dim);
  spec.ambient_dim = ambient;
  spec.points_per_subspace.assign(static_cast<std::size_t>(std::max(k, 0)), per);
  spec.noise_sigma = sigma;
  spec.seed = seed;
  return spec;
}

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SyntheticSpec: " + msg); };
  if (k < 1) fail("k must be >= 1");
  if (ambient_dim < 1) fail("ambient_dim must be >= 1");
  if (subspace_dims.size() != static_cast<std::size_t>(k)) fail("need one subspace dimension per subspace");
  if (points_per_subspace.size() != static_cast<std::size_t>(k)) fail("need one point count per subspace");
  int total_dim = 0;
  for (int r : subspace_dims) {
    if (r < 1 || r > ambient_dim) fail("subspace dimension " + std::to_string(r) + " outside [1, ambient_dim]");
    total_dim += r;
  }
  for (int p : points_per_subspace)
    if (p < 1) fail("points per subspace must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be finite and >= 0");
  if (!(within_correlation >= 0.0 && within_correlation < 1.0)) fail("within_correlation must be in [0, 1)");
  if (independent && total_dim > ambient_dim) {
    fail("independent subspaces need sum of dimensions (" + std::to_string(total_dim) + ") <= ambient_dim (" +
         std::to_string(ambient_dim) + ")");
  }
}

LabeledData gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
    return M;
  };
  auto orthonormal = [&](Eigen::Index rows, Eigen::Index cols) -> Matrix {
    Eigen::HouseholderQR<Matrix> qr(gaussian(rows, cols));
    return qr.householderQ() * Matrix::Identity(rows, cols);
  };

  const Eigen::Index d = spec.ambient_dim;
  std::vector<Matrix> bases;
  if (spec.independent) {
    const Matrix rotation = orthonormal(d, d);
    Eigen::Index offset = 0;
    for (int r : spec.subspace_dims) {
      bases.push_back(rotation.middleCols(offset, r));
      offset += r;
    }
  } else {
    for (int r : spec.subspace_dims) bases.push_back(orthonormal(d, r));
  }

  Eigen::Index n = 0;
  for (int p : spec.points_per_subspace) n += p;
  LabeledData data;
  data.X.resize(d, n);
  data.labels.reserve(static_cast<std::size_t>(n));
  const double shared_weight = std::sqrt(spec.within_correlation);
  const double own_weight = std::sqrt(1.0 - spec.within_correlation);
  Eigen::Index col = 0;
  for (int s = 0; s < spec.k; ++s) {
    const Matrix& B = bases[static_cast<std::size_t>(s)];
    const Vector shared = gaussian(B.cols(), 1).col(0);
    for (int p = 0; p < spec.points_per_subspace[static_cast<std::size_t>(s)]; ++p) {
      const Vector coeffs = shared_weight * shared + own_weight * gaussian(B.cols(), 1).col(0);
      data.X.col(col) = B * coeffs;
      data.labels.push_back(s);
      ++col;
    }
  }
  if (spec.noise_sigma > 0.0) data.X += spec.noise_sigma * gaussian(d, n);
  data.X = normalize_columns(data.X);

  std::ostringstream src;
  src << "synthetic:k=" << spec.k << ";dims=";
  for (std::size_t i = 0; i < spec.subspace_dims.size(); ++i) src << (i ? "," : "") << spec.subspace_dims[i];
  src << ";ambient=" << spec.ambient_dim << ";per=";
  for (std::size_t i = 0; i < spec.points_per_subspace.size(); ++i) src << (i ? "," : "") << spec.points_per_subspace[i];
  src << ";sigma=" << spec.noise_sigma << ";corr=" << spec.within_correlation
      << ";independent=" << (spec.independent ? 1 : 0) << ";seed=" << spec.seed;
  data.source = src.str();
  return data;
}

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset, const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw IdxError(IdxError::Kind::truncated, path.string() + ": truncated header");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void expect_magic(std::uint32_t got, std::uint32_t want, const std::filesystem::path& path) {
  if (got != want) {
    std::ostringstream msg;
    msg << path.string() << ": wrong magic 0x" << std::hex << got << " (expected 0x" << want << ")";
    throw IdxError(IdxError::Kind::wrong_magic, msg.str());
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

LabeledData load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_bytes(images);
  const auto lab = read_bytes(labels);
  expect_magic(read_be32(img, 0, images), kIdxImagesMagic, images);
  expect_magic(read_be32(lab, 0, labels), kIdxLabelsMagic, labels);

  const std::uint64_t count = read_be32(img, 4, images);
  const std::uint64_t rows = read_be32(img, 8, images);
  const std::uint64_t cols = read_be32(img, 12, images);
  const std::uint64_t label_count = read_be32(lab, 4, labels);
  const std::uint64_t pixels = rows * cols;
  if (img.size() < 16 + count * pixels) {
    throw IdxError(IdxError::Kind::truncated, images.string() + ": expected " + std::to_string(count * pixels) +
                                                  " pixel bytes, found " + std::to_string(img.size() - 16));
  }
  if (lab.size() < 8 + label_count) {
    throw IdxError(IdxError::Kind::truncated, labels.string() + ": expected " + std::to_string(label_count) +
                                                  " label bytes, found " + std::to_string(lab.size() - 8));
  }
  if (count != label_count) {
    throw IdxError(IdxError::Kind::count_mismatch, "IDX count mismatch: " + std::to_string(count) + " images vs " +
                                                       std::to_string(label_count) + " labels");
  }

  LabeledData data;
  data.X.resize(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(count));
  for (std::uint64_t j = 0; j < count; ++j) {
    const unsigned char* base = img.data() + 16 + j * pixels;
    for (std::uint64_t p = 0; p < pixels; ++p) {
      data.X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)) = static_cast<double>(base[p]) / 255.0;
    }
  }
  std::vector<int> raw(lab.begin() + 8, lab.begin() + 8 + static_cast<std::ptrdiff_t>(label_count));
  data.labels = relabel_contiguous(raw);
  data.source = "idx:" + images.string() + "|" + labels.string();
  return data;
}

Matrix load_csv(const std::filesystem::path& path, CsvOrientation orientation, bool header) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string(), 0, 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = header;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split_commas(line);
    if (!rows.empty() && cells.size() != width) {
      throw CsvError(path.string() + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                         " fields, expected " + std::to_string(width),
                     line_no, std::min(cells.size(), width) + 1);
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], values[c]) || !std::isfinite(values[c])) {
        throw CsvError(path.string() + ": non-numeric cell at (" + std::to_string(line_no) + "," + std::to_string(c + 1) +
                           "): '" + std::string(cells[c]) + "'",
                       line_no, c + 1);
      }
    }
    width = cells.size();
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw CsvError(path.string() + ": no data rows", 0, 0);

  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(width);
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (orientation == CsvOrientation::samples_as_rows) return M.transpose();
  return M;
}

std::vector<int> load_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string(), 0, 0);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto cells = split_commas(line);
    const std::string_view cell = cells.size() >= 2 ? cells[1] : cells[0];
    int value = 0;
    if (!parse_number(cell, value)) {
      if (first) {
        first = false;
        continue;
      }
      throw CsvError(path.string() + ": bad label at (" + std::to_string(line_no) + "," +
                         std::to_string(cells.size() >= 2 ? 2 : 1) + ")",
                     line_no, cells.size() >= 2 ? 2 : 1);
    }
    first = false;
    labels.push_back(value);
  }
  if (labels.empty()) throw CsvError(path.string() + ": no labels", 0, 0);
  return labels;
}

std::vector<int> relabel_contiguous(const std::vector<int>& labels) {
  std::vector<int> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), labels[i]) - distinct.begin());
  }
  return out;
}

LabeledData first_m_per_class(const LabeledData& data, int m) {
  data.validate();
  if (m < 1) throw std::invalid_argument("first_m_per_class: m must be >= 1");
  std::map<int, int> counts;
  for (int l : data.labels) ++counts[l];
  for (const auto& [label, count] : counts) {
    if (count < m) {
      throw std::invalid_argument("first_m_per_class: class " + std::to_string(label) + " has only " +
                                  std::to_string(count) + " samples, need " + std::to_string(m));
    }
  }
  std::vector<Eigen::Index> keep;
  std::map<int, int> taken;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (taken[data.labels[i]]++ < m) keep.push_back(static_cast<Eigen::Index>(i));
  }
  LabeledData out;
  out.X.resize(data.X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) = data.X.col(keep[j]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(keep[j])]);
  }
  out.source = data.source + "|first_" + std::to_string(m) + "_per_class";
  return out;
}

}  // namespace cass
