#include "cass/cli.hpp"

#include "cass/data.hpp"
#include "cass/segmentation.hpp"
#include "cass/trace_lasso.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

namespace cass::cli {

namespace {

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string echo_lines(const ConfigMap& effective) {
  std::string s;
  for (const auto& [key, value] : effective) s += "# " + key + " = " + value + "\n";
  return s;
}

// Samples as rows, shortest round-trip formatting so reloading is exact.
std::string matrix_rows_csv(const Matrix& X) {
  std::string s;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (i) s += ',';
      s += format_real(X(i, j));
    }
    s += '\n';
  }
  return s;
}

std::string labels_csv(const std::vector<int>& labels) {
  std::string s = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) s += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
  return s;
}

struct SynthOptions {
  int k = 3, dim = 4, ambient = 30, per = 20;
  double sigma = 0.0, corr = 0.0;
  bool dependent = false;
  std::uint64_t seed = 0;
  std::string output = "synthetic";
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  SyntheticSpec spec = SyntheticSpec::uniform(o.k, o.dim, o.ambient, o.per, o.sigma, o.seed);
  spec.within_correlation = o.corr;
  spec.independent = !o.dependent;
  spec.validate();
  const LabeledData data = gen_synthetic(spec);

  const ConfigMap effective = {{"command", "synth"},
                               {"k", std::to_string(o.k)},
                               {"dim", std::to_string(o.dim)},
                               {"ambient", std::to_string(o.ambient)},
                               {"per", std::to_string(o.per)},
                               {"sigma", format_real(o.sigma)},
                               {"corr", format_real(o.corr)},
                               {"dependent", o.dependent ? "true" : "false"},
                               {"seed", std::to_string(o.seed)},
                               {"source", data.source}};
  const std::string data_path = o.output + "_data.csv";
  const std::string labels_path = o.output + "_labels.csv";
  write_file(data_path, echo_lines(effective) + matrix_rows_csv(data.X));
  write_file(labels_path, echo_lines(effective) + labels_csv(data.labels));
  out << "source: " << data.source << "\n";
  out << "wrote " << data_path << " (" << data.X.rows() << "x" << data.X.cols() << ") and " << labels_path << "\n";
  return kOk;
}

struct SegmentOptions {
  std::string input, labels, orientation = "rows", method = "cass", output, config;
  bool header = false;
  int k = 2;
  double lambda = 0.1;
  std::uint64_t seed = 0;
  int pca_dim = 0, workers = 1, restarts = 50, knn_neighbors = 6;
  AdmConfig adm;
};

int cmd_segment(const SegmentOptions& o, std::ostream& out) {
  Matrix X;
  std::vector<int> truth;
  try {
    X = load_csv(o.input,
                 o.orientation == "columns" ? CsvOrientation::samples_as_columns : CsvOrientation::samples_as_rows,
                 o.header);
    if (!o.labels.empty()) truth = relabel_contiguous(load_labels_csv(o.labels));
  } catch (const CsvError& e) {
    throw IoError(e.what());
  }
  if (!truth.empty() && static_cast<Eigen::Index>(truth.size()) != X.cols()) {
    throw UsageError(std::to_string(truth.size()) + " labels for " + std::to_string(X.cols()) + " samples");
  }
  if (o.pca_dim > 0) X = pca_project(X, o.pca_dim);

  SegmentationConfig config;
  config.method = parse_method(o.method);
  config.k = o.k;
  config.lambda = o.lambda;
  config.adm = o.adm;
  config.seed = o.seed;
  config.workers = o.workers;
  config.kmeans_restarts = o.restarts;
  config.knn_neighbors = o.knn_neighbors;

  const auto start = std::chrono::steady_clock::now();
  const SegmentationResult result = segment(X, config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ConfigMap effective = {{"command", "segment"},
                         {"input", o.input},
                         {"labels", o.labels},
                         {"orientation", o.orientation},
                         {"header", o.header ? "true" : "false"},
                         {"method", o.method},
                         {"k", std::to_string(o.k)},
                         {"lambda", format_real(o.lambda)},
                         {"seed", std::to_string(o.seed)},
                         {"pca-dim", std::to_string(o.pca_dim)},
                         {"workers", std::to_string(o.workers)},
                         {"restarts", std::to_string(o.restarts)},
                         {"knn-neighbors", std::to_string(o.knn_neighbors)},
                         {"mu0", format_real(o.adm.mu0)},
                         {"rho", format_real(o.adm.rho)},
                         {"mu-max", format_real(o.adm.mu_max)},
                         {"eps", format_real(o.adm.eps)},
                         {"max-iter", std::to_string(o.adm.max_iter)}};
  const std::string echo = echo_lines(effective);

  write_file(o.output + "_labels.csv", echo + labels_csv(result.labels));
  std::string diag = echo + "index,iterations,converged,residual,objective\n";
  int nonconverged = 0;
  for (const auto& d : result.coefficients.diagnostics) {
    diag += std::to_string(d.index) + "," + std::to_string(d.iterations) + "," + (d.converged ? "1" : "0") + "," +
            format_real(d.residual) + "," + format_real(d.objective) + "\n";
    if (!d.converged) ++nonconverged;
  }
  write_file(o.output + "_diagnostics.csv", diag);

  nlohmann::ordered_json summary;
  summary["config"] = effective;
  summary["samples"] = X.cols();
  summary["all_converged"] = nonconverged == 0;
  summary["nonconverged_points"] = nonconverged;
  if (!truth.empty()) {
    const double acc = accuracy(result.labels, truth);
    summary["accuracy"] = acc;
    summary["error"] = 1.0 - acc;
    out << "accuracy: " << format_real(acc) << "\n";
  }
  summary["metadata"] = {{"timestamp", utc_timestamp()}, {"wall_seconds", wall}};
  write_file(o.output + "_summary.json", summary.dump(2) + "\n");

  out << "wrote " << o.output << "_labels.csv, " << o.output << "_diagnostics.csv, " << o.output
      << "_summary.json\n";
  if (nonconverged > 0) {
    out << "solver did not converge on " << nonconverged << " point(s); see diagnostics\n";
    return kNonConvergence;
  }
  return kOk;
}

struct NormsOptions {
  int dim = 12, n = 8, steps = 11;
  std::uint64_t seed = 0;
  std::string output = "norms.csv";
};

int cmd_norms(const NormsOptions& o, std::ostream& out) {
  if (o.dim < o.n + 1) throw UsageError("norms: --dim must be at least --n + 1");
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss;
  Matrix G(o.dim, o.n + 1);
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = gauss(rng);
  Vector w(o.n);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = gauss(rng);
  // Column 0 is the shared direction, the rest are private; all orthonormal.
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ() * Matrix::Identity(o.dim, o.n + 1);

  const ConfigMap effective = {{"command", "norms"},
                               {"dim", std::to_string(o.dim)},
                               {"n", std::to_string(o.n)},
                               {"steps", std::to_string(o.steps)},
                               {"seed", std::to_string(o.seed)}};
  std::string csv = echo_lines(effective) + "correlation,trace_lasso,l1,l2\n";
  for (int s = 0; s < o.steps; ++s) {
    const double rho = static_cast<double>(s) / static_cast<double>(o.steps - 1);
    Matrix X(o.dim, o.n);
    for (int i = 0; i < o.n; ++i) X.col(i) = std::sqrt(rho) * Q.col(0) + std::sqrt(1.0 - rho) * Q.col(i + 1);
    csv += format_real(rho) + "," + format_real(trace_lasso_norm(X, w)) + "," + format_real(w.lpNorm<1>()) + "," +
           format_real(w.norm()) + "\n";
  }
  write_file(o.output, csv);
  out << "wrote " << o.steps << " rows to " << o.output << "\n";
  return kOk;
}

// Subcommand name and --config value, located before CLI11 sees the arguments.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  const std::string& sub = args[1];
  if (sub != "synth" && sub != "segment" && sub != "norms") return args;
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> expanded(args.begin(), args.begin() + 2);
  // File values first; flags later on the line take precedence.
  for (const auto& [key, value] : read_config_file(path)) {
    // Echoed provenance keys are informational.
    if (key == "command" || key == "source") continue;
    expanded.push_back("--" + key + "=" + value);
  }
  expanded.insert(expanded.end(), args.begin() + 2, args.end());
  return expanded;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subspace segmentation by trace Lasso regression"};
  app.name(argc > 0 ? std::filesystem::path(argv[0]).filename().string() : "cass");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Generate a labeled union-of-subspaces dataset");
  s->add_option("--k", synth.k, "Number of subspaces")->check(CLI::Range(1, 1000));
  s->add_option("--dim", synth.dim, "Dimension of each subspace")->check(CLI::Range(1, 100000));
  s->add_option("--ambient", synth.ambient, "Ambient dimension")->check(CLI::Range(1, 100000));
  s->add_option("--per", synth.per, "Points per subspace")->check(CLI::Range(1, 10000000));
  s->add_option("--sigma", synth.sigma, "Gaussian noise scale")->check(CLI::NonNegativeNumber);
  s->add_option("--corr", synth.corr, "Within-subspace coefficient correlation in [0, 1)");
  s->add_flag("--dependent", synth.dependent, "Draw bases at random instead of disjoint blocks");
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--output", synth.output, "Output prefix (writes <prefix>_data.csv, <prefix>_labels.csv)");
  s->add_option("--config", "Flat key = value file; flags override it");

  SegmentOptions seg;
  auto* g = app.add_subcommand("segment", "Segment the samples of a CSV file");
  g->add_option("--input", seg.input, "Data CSV")->required();
  g->add_option("--labels", seg.labels, "Ground-truth labels CSV (enables accuracy)");
  g->add_option("--orientation", seg.orientation, "rows: one sample per row; columns: one per column")
      ->check(CLI::IsMember({"rows", "columns"}));
  g->add_flag("--header", seg.header, "Skip the first non-comment line of the data file");
  g->add_option("--method", seg.method, "cass, ssc, lrr, lsr or knn")
      ->check(CLI::IsMember({"cass", "ssc", "lrr", "lsr", "knn"}));
  g->add_option("--k", seg.k, "Number of segments")->required()->check(CLI::Range(2, 1000000));
  g->add_option("--lambda", seg.lambda, "Regularization weight")->check(CLI::PositiveNumber);
  g->add_option("--seed", seg.seed, "k-means seed");
  g->add_option("--pca-dim", seg.pca_dim, "Project onto this many principal components first (0: off)")
      ->check(CLI::NonNegativeNumber);
  g->add_option("--workers", seg.workers, "Threads for per-point problems")->check(CLI::Range(1, 4096));
  g->add_option("--restarts", seg.restarts, "k-means restarts")->check(CLI::Range(1, 100000));
  g->add_option("--knn-neighbors", seg.knn_neighbors, "Neighbors for the knn graph")->check(CLI::Range(1, 100000));
  g->add_option("--mu0", seg.adm.mu0, "Initial penalty")->check(CLI::PositiveNumber);
  g->add_option("--rho", seg.adm.rho, "Penalty growth factor");
  g->add_option("--mu-max", seg.adm.mu_max, "Penalty cap")->check(CLI::PositiveNumber);
  g->add_option("--eps", seg.adm.eps, "Stopping tolerance")->check(CLI::PositiveNumber);
  g->add_option("--max-iter", seg.adm.max_iter, "Iteration cap per point")->check(CLI::Range(1, 100000000));
  g->add_option("--output", seg.output, "Output prefix")->required();
  g->add_option("--config", seg.config, "Flat key = value file; flags override it");

  std::string bench_config, bench_output = "benchmark";
  int bench_workers = 0;
  std::string bench_methods;
  auto* b = app.add_subcommand("benchmark", "Run a method x dataset x lambda grid");
  b->add_option("--config", bench_config, "Benchmark description (key = value)")->required();
  b->add_option("--output", bench_output, "Output prefix (writes <prefix>.csv, <prefix>.json)");
  b->add_option("--workers", bench_workers, "Concurrent cells (overrides the file)")->check(CLI::Range(1, 4096));
  b->add_option("--methods", bench_methods, "Comma-separated methods (overrides the file)");

  NormsOptions norms;
  auto* n = app.add_subcommand("norms", "Trace Lasso against l1 and l2 as column correlation grows");
  n->add_option("--dim", norms.dim, "Ambient dimension (>= n + 1)")->check(CLI::Range(2, 100000));
  n->add_option("--n", norms.n, "Number of columns")->check(CLI::Range(1, 100000));
  n->add_option("--steps", norms.steps, "Correlation samples from 0 to 1")->check(CLI::Range(2, 100000));
  n->add_option("--seed", norms.seed, "Random seed for w");
  n->add_option("--output", norms.output, "Curve CSV path");
  n->add_option("--config", "Flat key = value file; flags override it");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (g->parsed()) return cmd_segment(seg, out);
    if (n->parsed()) return cmd_norms(norms, out);
    ConfigMap config = read_config_file(bench_config);
    if (bench_workers > 0) config["workers"] = std::to_string(bench_workers);
    if (b->count("--methods")) config["methods"] = bench_methods;
    const BenchmarkOutcome outcome = run_benchmark(config, err);
    write_file(bench_output + ".csv", report_csv(outcome));
    write_file(bench_output + ".json", report_json(outcome, utc_timestamp()));
    out << "wrote " << bench_output << ".csv and " << bench_output << ".json (" << outcome.report.populated()
        << " cells)\n";
    if (!outcome.all_converged) {
      out << "some solver runs did not converge; see nonconverged_points in the JSON grid\n";
      return kNonConvergence;
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const IdxError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    // Remaining failures come from the numerical pipeline.
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  }
}

}  // namespace cass::cli
