#include "cass/cli.hpp"

#include "cass/data.hpp"
#include "cass/segmentation.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace cass::cli {

namespace {

// Records every key it hands out, defaults included, so the echo is complete.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigMap& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    const auto it = raw_.find(key);
    const std::string value = it == raw_.end() ? fallback : it->second;
    effective_[key] = value;
    return value;
  }

  std::string required(const std::string& key) {
    if (!has(key)) throw UsageError("config: missing required key '" + key + "'");
    return str(key, "");
  }

  long integer(const std::string& key, long fallback) {
    return parse_int(key, str(key, std::to_string(fallback)));
  }

  double real(const std::string& key, double fallback) {
    std::ostringstream s;
    s << fallback;
    return parse_real(key, str(key, s.str()));
  }

  bool boolean(const std::string& key, bool fallback) {
    const std::string v = str(key, fallback ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config: '" + key + "' must be true or false, got '" + v + "'");
  }

  static long parse_int(const std::string& key, const std::string& text) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw UsageError("config: '" + key + "' expects an integer, got '" + text + "'");
    }
    return value;
  }

  static double parse_real(const std::string& key, const std::string& text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      throw UsageError("config: '" + key + "' expects a number, got '" + text + "'");
    }
    return value;
  }

  void reject_unused() const {
    for (const auto& [key, value] : raw_) {
      if (!effective_.count(key)) throw UsageError("config: unknown key '" + key + "'");
    }
  }

  const ConfigMap& effective() const { return effective_; }

 private:
  const ConfigMap& raw_;
  ConfigMap effective_;
};

struct Dataset {
  std::string name;
  std::vector<LabeledData> replicates;
  int k = 0;
  std::vector<int> pca_dims;  // 0: none
};

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Dataset load_dataset(const std::string& name, ConfigReader& cfg) {
  const std::string p = name + ".";
  Dataset ds;
  ds.name = name;
  const std::string kind = cfg.required(p + "kind");
  try {
    if (kind == "synthetic") {
      SyntheticSpec spec = SyntheticSpec::uniform(
          static_cast<int>(cfg.integer(p + "k", 3)), static_cast<int>(cfg.integer(p + "dim", 4)),
          static_cast<int>(cfg.integer(p + "ambient", 30)), static_cast<int>(cfg.integer(p + "per", 20)),
          cfg.real(p + "sigma", 0.0), 0);
      spec.within_correlation = cfg.real(p + "corr", 0.0);
      spec.independent = cfg.boolean(p + "independent", true);
      for (const auto& s : split_list(cfg.str(p + "seeds", "0"))) {
        spec.seed = static_cast<std::uint64_t>(ConfigReader::parse_int(p + "seeds", s));
        spec.validate();
        ds.replicates.push_back(gen_synthetic(spec));
      }
      if (ds.replicates.empty()) throw UsageError("config: '" + p + "seeds' is empty");
    } else if (kind == "csv") {
      const std::string orientation = cfg.str(p + "orientation", "rows");
      if (orientation != "rows" && orientation != "columns") {
        throw UsageError("config: '" + p + "orientation' must be rows or columns");
      }
      LabeledData d;
      d.X = load_csv(cfg.required(p + "data"),
                     orientation == "rows" ? CsvOrientation::samples_as_rows : CsvOrientation::samples_as_columns,
                     cfg.boolean(p + "header", false));
      d.labels = relabel_contiguous(load_labels_csv(cfg.required(p + "labels")));
      d.source = "csv:" + cfg.str(p + "data", "");
      if (static_cast<Eigen::Index>(d.labels.size()) != d.X.cols()) {
        throw UsageError("dataset '" + name + "': " + std::to_string(d.labels.size()) + " labels for " +
                         std::to_string(d.X.cols()) + " samples");
      }
      ds.replicates.push_back(std::move(d));
    } else if (kind == "idx") {
      ds.replicates.push_back(load_idx(cfg.required(p + "images"), cfg.required(p + "labels")));
    } else {
      throw UsageError("config: '" + p + "kind' must be synthetic, csv or idx, got '" + kind + "'");
    }
  } catch (const UsageError&) {
    throw;
  } catch (const CsvError& e) {
    throw IoError("dataset '" + name + "': " + e.what());
  } catch (const IdxError& e) {
    throw IoError("dataset '" + name + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError("dataset '" + name + "': " + e.what());
  }

  const long per_class = cfg.integer(p + "per_class", 0);
  if (per_class < 0) throw UsageError("config: '" + p + "per_class' must be >= 0");
  if (per_class > 0) {
    try {
      for (auto& d : ds.replicates) d = first_m_per_class(d, static_cast<int>(per_class));
    } catch (const std::invalid_argument& e) {
      throw UsageError("dataset '" + name + "': " + e.what());
    }
  }
  ds.k = static_cast<int>(cfg.integer(p + "k", ds.replicates.front().num_classes()));

  for (const auto& item : split_list(cfg.str(p + "pca_dims", "0"))) {
    if (item == "face") {
      ds.pca_dims.push_back(face_pca_dim(ds.k));
    } else if (item == "motion") {
      ds.pca_dims.push_back(kMotionPcaDim);
    } else {
      const long dim = ConfigReader::parse_int(p + "pca_dims", item);
      if (dim < 0) throw UsageError("config: '" + p + "pca_dims' entries must be >= 0");
      ds.pca_dims.push_back(static_cast<int>(dim));
    }
  }
  if (ds.pca_dims.empty()) ds.pca_dims.push_back(0);
  return ds;
}

struct Task {
  std::size_t dataset;
  Method method;
  double lambda;
  int pca_dim;
};

}  // namespace

BenchmarkOutcome run_benchmark(const ConfigMap& config, std::ostream& log) {
  ConfigReader cfg(config);
  const auto method_names = split_list(cfg.str("methods", ""));
  if (method_names.empty()) throw UsageError("config: 'methods' lists no method");
  std::vector<Method> methods;
  for (const auto& m : method_names) {
    try {
      methods.push_back(parse_method(m));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  }
  const auto dataset_names = split_list(cfg.str("datasets", ""));
  if (dataset_names.empty()) throw UsageError("config: 'datasets' lists no dataset");

  std::vector<double> default_grid;
  for (const auto& s : split_list(cfg.str("lambdas", "0.01, 0.1, 1"))) {
    default_grid.push_back(ConfigReader::parse_real("lambdas", s));
  }
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("seed", 0));
  const long workers = cfg.integer("workers", 1);
  const long restarts = cfg.integer("restarts", 20);
  if (workers < 1) throw UsageError("config: 'workers' must be >= 1");
  if (restarts < 1) throw UsageError("config: 'restarts' must be >= 1");

  std::vector<Dataset> datasets;
  for (const auto& name : dataset_names) datasets.push_back(load_dataset(name, cfg));

  std::vector<Task> tasks;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (Method m : methods) {
      std::vector<double> grid = default_grid;
      const std::string key = "lambdas." + to_string(m);
      if (cfg.has(key)) {
        grid.clear();
        for (const auto& s : split_list(cfg.str(key, ""))) grid.push_back(ConfigReader::parse_real(key, s));
      }
      // The kNN graph has no regularization weight; 1 is a placeholder.
      if (m == Method::knn) grid = {1.0};
      if (grid.empty()) throw UsageError("config: empty lambda grid for " + to_string(m));
      for (double lambda : grid) {
        if (!(lambda > 0.0)) throw UsageError("config: lambda values must be > 0");
        for (int p : datasets[d].pca_dims) tasks.push_back({d, m, lambda, p});
      }
    }
  }
  cfg.reject_unused();

  BenchmarkOutcome outcome;
  outcome.effective = cfg.effective();
  outcome.grid.resize(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      const Dataset& ds = datasets[task.dataset];
      GridEntry& entry = outcome.grid[t];
      entry.dataset = ds.name;
      entry.method = to_string(task.method);
      entry.lambda = task.lambda;
      entry.pca_dim = task.pca_dim;
      try {
        const auto start = std::chrono::steady_clock::now();
        for (const auto& rep : ds.replicates) {
          SegmentationConfig sc;
          sc.method = task.method;
          sc.k = ds.k;
          sc.lambda = task.lambda;
          sc.kmeans_restarts = static_cast<int>(restarts);
          sc.seed = seed;
          const Matrix X = task.pca_dim > 0 ? pca_project(rep.X, task.pca_dim) : rep.X;
          const SegmentationResult r = segment(X, sc);
          entry.accuracies.push_back(accuracy(r.labels, rep.labels));
          for (const auto& diag : r.coefficients.diagnostics) {
            entry.iterations += diag.iterations;
            if (!diag.converged) ++entry.nonconverged_points;
          }
        }
        entry.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        double sum = 0.0;
        for (double a : entry.accuracies) sum += a;
        entry.mean_accuracy = sum / static_cast<double>(entry.accuracies.size());
        std::lock_guard lock(log_mutex);
        log << "cell " << ds.name << " " << entry.method << " lambda=" << format_real(entry.lambda)
            << " pca=" << entry.pca_dim << " accuracy=" << format_real(entry.mean_accuracy) << "\n";
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < thread_count; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::invalid_argument& e) {
      throw UsageError("cell " + datasets[tasks[t].dataset].name + "/" + to_string(tasks[t].method) + ": " + e.what());
    }
  }

  // First candidate in grid order wins ties.
  std::vector<CellResult> cells;
  for (const auto& ds : datasets) {
    for (Method m : methods) {
      const GridEntry* best = nullptr;
      for (const auto& e : outcome.grid) {
        if (e.dataset != ds.name || e.method != to_string(m)) continue;
        if (!best || e.mean_accuracy > best->mean_accuracy) best = &e;
      }
      if (!best) continue;
      CellResult cell;
      cell.dataset = best->dataset;
      cell.method = best->method;
      cell.accuracies = best->accuracies;
      if (m != Method::knn) cell.lambda = best->lambda;
      if (best->pca_dim > 0) cell.pca_dim = best->pca_dim;
      cell.wall_seconds = best->wall_seconds;
      cell.iterations = best->iterations;
      cells.push_back(std::move(cell));
    }
  }
  for (const auto& e : outcome.grid) outcome.all_converged = outcome.all_converged && e.nonconverged_points == 0;
  outcome.report = benchmark_report(cells, dataset_names, method_names);
  for (const auto& ds : datasets) {
    outcome.report.metadata["source." + ds.name] = ds.replicates.front().source;
  }
  return outcome;
}

std::string report_csv(const BenchmarkOutcome& outcome) {
  std::ostringstream out;
  for (const auto& [key, value] : outcome.effective) out << "# " << key << " = " << value << "\n";
  out << "dataset,method,accuracy,error,error_max,error_mean,error_std,lambda,pca_dim,replicates,iterations\n";
  for (const auto& row : outcome.report.rows) {
    out << row.dataset << "," << row.method << ",";
    if (row.accuracy) {
      out << format_real(*row.accuracy) << "," << format_real(*row.error) << "," << format_real(row.error_stats->max)
          << "," << format_real(row.error_stats->mean) << "," << format_real(row.error_stats->std) << ",";
      out << (row.lambda ? format_real(*row.lambda) : "") << ",";
      out << (row.pca_dim ? std::to_string(*row.pca_dim) : "") << ",";
      out << row.replicates << "," << row.iterations;
    } else {
      out << ",,,,,,,,";
    }
    out << "\n";
  }
  return out.str();
}

std::string report_json(const BenchmarkOutcome& outcome, const std::string& timestamp) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["config"] = outcome.effective;
  ordered_json rows = ordered_json::array();
  ordered_json wall = ordered_json::object();
  for (const auto& row : outcome.report.rows) {
    ordered_json r;
    r["dataset"] = row.dataset;
    r["method"] = row.method;
    if (row.accuracy) {
      r["accuracy"] = *row.accuracy;
      r["error"] = *row.error;
      r["error_max"] = row.error_stats->max;
      r["error_mean"] = row.error_stats->mean;
      r["error_std"] = row.error_stats->std;
      r["lambda"] = row.lambda ? ordered_json(*row.lambda) : ordered_json(nullptr);
      r["pca_dim"] = row.pca_dim ? ordered_json(*row.pca_dim) : ordered_json(nullptr);
      r["replicates"] = row.replicates;
      r["iterations"] = row.iterations;
      wall[row.dataset + "/" + row.method] = row.wall_seconds;
    } else {
      r["accuracy"] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  ordered_json grid = ordered_json::array();
  for (const auto& e : outcome.grid) {
    grid.push_back({{"dataset", e.dataset},
                    {"method", e.method},
                    {"lambda", e.lambda},
                    {"pca_dim", e.pca_dim},
                    {"accuracies", e.accuracies},
                    {"mean_accuracy", e.mean_accuracy},
                    {"iterations", e.iterations},
                    {"nonconverged_points", e.nonconverged_points}});
  }
  doc["grid"] = std::move(grid);
  ordered_json meta(outcome.report.metadata);
  meta["timestamp"] = timestamp;
  meta["wall_seconds"] = std::move(wall);
  doc["metadata"] = std::move(meta);
  return doc.dump(2) + "\n";
}

}  // namespace cass::cli
