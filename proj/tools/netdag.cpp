// Command-line pipeline: instance generation, fitting, path/BIC selection,
// de-correlation export, evaluation, and ROC sweeps.

#include "netdag/bcd.hpp"
#include "netdag/io.hpp"
#include "netdag/metrics.hpp"
#include "netdag/rng.hpp"
#include "netdag/simulate.hpp"
#include "netdag/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace netdag;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::uint64_t global_seed(std::optional<std::uint64_t> flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("NETDAG_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

void write_meta(const fs::path& dir, json meta) {
  meta["version"] = kVersion;
  std::ofstream out(dir / "meta.json");
  out << meta.dump(2) << '\n';
}

std::vector<std::string> index_headers(const char* prefix, Index count) {
  std::vector<std::string> h;
  h.reserve(count);
  for (Index i = 0; i < count; ++i) h.push_back(prefix + std::to_string(i + 1));
  return h;
}

// Replicate subdirectories rep_0, rep_1, ... if present; otherwise the
// directory itself is the single replicate.
std::vector<fs::path> replicate_dirs(const fs::path& root) {
  std::vector<fs::path> reps;
  for (int i = 0;; ++i) {
    fs::path candidate = root / ("rep_" + std::to_string(i));
    if (!fs::exists(candidate)) break;
    reps.push_back(candidate);
  }
  if (reps.empty()) reps.push_back(root);
  return reps;
}

void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct DataBundle {
  DataMatrix x;
  SupportMask mask;
};

DataBundle load_data(const fs::path& dir) {
  NamedMatrix xm = read_csv((dir / "X.csv").string());
  std::vector<std::string> rows;
  rows.reserve(xm.values.rows());
  for (Index i = 0; i < xm.values.rows(); ++i) rows.push_back("r" + std::to_string(i));
  DataMatrix x = DataMatrix::make(std::move(xm.values), std::move(xm.headers), std::move(rows));
  SupportMask mask = SupportMask::make(read_mask_csv((dir / "mask.csv").string()));
  if (mask.n() != x.n()) throw std::invalid_argument("mask size does not match X rows");
  return DataBundle{std::move(x), std::move(mask)};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  Index n = 0;
  Index p = 0;
  Index edges = -1;  // default 2p
  std::string cov = "equicor";
  Index block_size = 20;
  std::string network_file;
  Index network_nodes = 100;
  std::string dag_file;
  int dag_copies = 1;
  int replicates = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
};

void write_ground_truth(const fs::path& dir, const GroundTruth& gt, const json& meta) {
  fs::create_directories(dir);
  write_csv((dir / "X.csv").string(), gt.data.values, gt.data.column_labels);
  write_csv((dir / "B.csv").string(), gt.dag.b, gt.data.column_labels);
  write_csv((dir / "theta.csv").string(), gt.row_precision.theta,
            index_headers("n", gt.row_precision.n()));
  write_mask_csv((dir / "mask.csv").string(), gt.mask.adjacency);
  write_vector_csv((dir / "omega_sq.csv").string(), gt.dag.omega_sq, gt.data.column_labels);
  // natural ordering of the true graph, consumable via --ordering-file
  if (auto order = topological_order(gt.dag.support())) {
    std::ofstream out(dir / "ordering.txt");
    for (Index j : *order) out << gt.data.column_labels[j] << '\n';
  }
  write_meta(dir, meta);
}

int cmd_simulate(const SimulateArgs& args) {
  const std::uint64_t seed = global_seed(args.seed);
  fs::create_directories(args.out);

  const bool from_network = !args.network_file.empty();
  const bool from_dag_file = !args.dag_file.empty();
  if (!from_dag_file && args.p < 2)
    throw std::invalid_argument("--p is required without --dag-file");
  if (!from_network && args.n < 2)
    throw std::invalid_argument("--n is required without --network-file");

  std::vector<std::pair<Index, Index>> network_edges;
  Index network_total = 0;
  if (from_network) {
    network_edges = read_edge_list(args.network_file);
    for (const auto& [u, v] : network_edges)
      network_total = std::max({network_total, u + 1, v + 1});
  }
  NamedEdgeList dag_edges;
  if (from_dag_file) dag_edges = read_dag_edge_list(args.dag_file);

  run_parallel(args.replicates, args.jobs, [&](std::size_t rep) {
    const std::uint64_t rep_seed = Rng::mix(seed, rep);

    DagParams dag = [&] {
      if (from_dag_file) {
        const auto base_p = static_cast<Index>(dag_edges.names.size());
        DagParams base = dag_from_edges(dag_edges.edges, base_p, {0.1, 1.0}, {0.1, 1.0},
                                        Rng::mix(rep_seed, 1));
        return args.dag_copies > 1
                   ? replicate_dag(base, args.dag_copies, {0.1, 1.0}, Rng::mix(rep_seed, 2))
                   : base;
      }
      DagSpec spec;
      spec.p = args.p;
      spec.num_edges = args.edges >= 0 ? args.edges : 2 * args.p;
      spec.seed = Rng::mix(rep_seed, 1);
      return random_dag(spec);
    }();

    RowPrecision rp = [&] {
      if (from_network) {
        auto sub = induced_subgraph(network_edges, network_total, args.network_nodes,
                                    Rng::mix(rep_seed, 3));
        return network_precision(sub, args.network_nodes, {-5.0, 5.0}, Rng::mix(rep_seed, 4));
      }
      CovSpec spec;
      spec.family = cov_family_from_string(args.cov);
      spec.block_size = args.block_size;
      if (args.n % args.block_size != 0)
        throw std::invalid_argument("n must be a multiple of the block size");
      spec.num_blocks = args.n / args.block_size;
      spec.seed = Rng::mix(rep_seed, 3);
      return build_covariance(spec);
    }();

    const Index n = from_network ? args.network_nodes : args.n;
    GroundTruth gt = sample_sem(dag, rp, n, Rng::mix(rep_seed, 5));

    json meta;
    meta["command"] = "simulate";
    meta["seed"] = seed;
    meta["replicate"] = rep;
    meta["replicate_seed"] = rep_seed;
    meta["n"] = n;
    meta["p"] = gt.dag.p();
    meta["s0"] = gt.dag.edge_count();
    if (from_network) {
      meta["network_file"] = args.network_file;
      meta["network_nodes"] = args.network_nodes;
    } else {
      meta["cov"] = args.cov;
      meta["block_size"] = args.block_size;
    }
    if (from_dag_file) {
      meta["dag_file"] = args.dag_file;
      meta["dag_copies"] = args.dag_copies;
    }
    write_ground_truth(fs::path(args.out) / ("rep_" + std::to_string(rep)), gt, meta);
  });

  json meta;
  meta["command"] = "simulate";
  meta["seed"] = seed;
  meta["replicates"] = args.replicates;
  write_meta(args.out, meta);
  return 0;
}

// ---------------------------------------------------------------------------
// fit / path

struct FitArgs {
  std::string data;
  std::string out;
  double lambda1 = -1.0;
  double lambda2 = 0.01;
  bool benchmark = false;
  std::string ordering_file;
  double tol = 1e-4;
  int max_iter = 50;
  bool strict = false;
  int num_points = 20;  // path only
  int jobs = 1;
};

std::optional<std::vector<Index>> load_ordering(const std::string& path, const DataMatrix& x,
                                                const fs::path& rep_dir) {
  if (path.empty()) return std::nullopt;
  // a bare filename resolves inside each replicate directory first
  fs::path resolved = fs::exists(rep_dir / path) ? rep_dir / path : fs::path(path);
  std::ifstream in(resolved);
  if (!in) throw std::invalid_argument("cannot open ordering file: " + resolved.string());
  std::vector<Index> order;
  std::string token;
  while (in >> token) {
    auto it = std::find(x.column_labels.begin(), x.column_labels.end(), token);
    if (it != x.column_labels.end()) {
      order.push_back(it - x.column_labels.begin());
    } else {
      try {
        order.push_back(static_cast<Index>(std::stol(token)));
      } catch (const std::exception&) {
        throw std::invalid_argument("ordering entry is neither a column name nor an index: " +
                                    token);
      }
    }
  }
  return order;
}

void write_fit_artifacts(const fs::path& dir, const DataMatrix& x, const FitResult& res,
                         const FitConfig& cfg, double bic, const json& extra) {
  fs::create_directories(dir);
  write_csv((dir / "B_hat.csv").string(), res.dag.b, x.column_labels);
  write_csv((dir / "theta_hat.csv").string(), res.row_precision.theta,
            index_headers("n", res.row_precision.n()));
  write_vector_csv((dir / "omega_hat.csv").string(), res.dag.omega_sq, x.column_labels);
  Matrix trace(static_cast<Index>(res.objective_trace.size()), 1);
  for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
    trace(static_cast<Index>(i), 0) = res.objective_trace[i];
  write_csv((dir / "trace.csv").string(), trace, {"objective"});

  json fit_info;
  fit_info["lambda1"] = cfg.penalties.lambda1;
  fit_info["lambda2"] = cfg.penalties.lambda2;
  fit_info["benchmark"] = cfg.benchmark_identity_theta;
  fit_info["objective"] = res.objective_trace.back();
  fit_info["bic"] = bic;
  fit_info["iterations"] = res.iterations;
  fit_info["converged"] = res.converged;
  fit_info["ridged"] = res.ridged_s;
  fit_info["edges"] = res.dag.edge_count();
  for (auto& [key, value] : extra.items()) fit_info[key] = value;
  std::ofstream out(dir / "fit.json");
  out << fit_info.dump(2) << '\n';
}

int cmd_fit(const FitArgs& args) {
  if (args.lambda1 < 0.0) throw std::invalid_argument("--lambda1 must be nonnegative");
  const auto reps = replicate_dirs(args.data);
  const bool nested = reps.front() != fs::path(args.data);

  run_parallel(reps.size(), args.jobs, [&](std::size_t i) {
    DataBundle bundle = load_data(reps[i]);
    FitConfig cfg;
    cfg.penalties = PenaltyConfig{args.lambda1, args.lambda2};
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.benchmark_identity_theta = args.benchmark;
    cfg.ordering = load_ordering(args.ordering_file, bundle.x, reps[i]);

    FitResult res = fit(bundle.x, bundle.mask, cfg);
    if (args.strict && !res.converged)
      throw std::runtime_error("fit did not converge within --max-iter");
    const double bic = bic_score(bundle.x, res.reparam, res.row_precision);
    const fs::path out = nested ? fs::path(args.out) / reps[i].filename() : fs::path(args.out);
    write_fit_artifacts(out, bundle.x, res, cfg, bic, json::object());
    json meta;
    meta["command"] = "fit";
    meta["data"] = reps[i].string();
    meta["lambda1"] = args.lambda1;
    meta["lambda2"] = args.lambda2;
    meta["benchmark"] = args.benchmark;
    meta["tol"] = args.tol;
    meta["max_iter"] = args.max_iter;
    write_meta(out, meta);
  });
  return 0;
}

int cmd_path(const FitArgs& args) {
  const auto reps = replicate_dirs(args.data);
  const bool nested = reps.front() != fs::path(args.data);

  run_parallel(reps.size(), args.jobs, [&](std::size_t i) {
    DataBundle bundle = load_data(reps[i]);
    FitConfig cfg;
    cfg.penalties = PenaltyConfig{0.0, args.lambda2};
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.benchmark_identity_theta = args.benchmark;
    cfg.ordering = load_ordering(args.ordering_file, bundle.x, reps[i]);

    SolutionPath path = solution_path(bundle.x, bundle.mask, cfg, args.num_points);
    const fs::path out = nested ? fs::path(args.out) / reps[i].filename() : fs::path(args.out);
    fs::create_directories(out);

    Matrix table(static_cast<Index>(path.lambdas.size()), 4);
    for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
      table(static_cast<Index>(k), 0) = path.lambdas[k];
      table(static_cast<Index>(k), 1) = path.fits[k].objective_trace.back();
      table(static_cast<Index>(k), 2) = path.bic_values[k];
      table(static_cast<Index>(k), 3) = static_cast<double>(path.fits[k].dag.edge_count());
    }
    write_csv((out / "path.csv").string(), table, {"lambda1", "objective", "bic", "edges"});

    const FitResult& sel = path.fits[path.selected_index];
    FitConfig sel_cfg = cfg;
    sel_cfg.penalties.lambda1 = path.lambdas[path.selected_index];
    json extra;
    extra["selected_index"] = path.selected_index;
    write_fit_artifacts(out, bundle.x, sel, sel_cfg, path.bic_values[path.selected_index], extra);
    write_fit_artifacts(out / "selected", bundle.x, sel, sel_cfg,
                        path.bic_values[path.selected_index], extra);

    json meta;
    meta["command"] = "path";
    meta["data"] = reps[i].string();
    meta["num_points"] = args.num_points;
    meta["lambda2"] = args.lambda2;
    meta["benchmark"] = args.benchmark;
    meta["selected_lambda1"] = path.lambdas[path.selected_index];
    meta["selected_index"] = path.selected_index;
    write_meta(out, meta);
  });
  return 0;
}

// ---------------------------------------------------------------------------
// decorrelate

struct DecorrelateArgs {
  std::string data;
  std::string fit;
  std::string out;
  int jobs = 1;
};

int cmd_decorrelate(const DecorrelateArgs& args) {
  const auto data_reps = replicate_dirs(args.data);
  const auto fit_reps = replicate_dirs(args.fit);
  if (data_reps.size() != fit_reps.size())
    throw std::invalid_argument("data and fit replicate counts differ");
  const bool nested = data_reps.front() != fs::path(args.data);

  run_parallel(data_reps.size(), args.jobs, [&](std::size_t i) {
    DataBundle bundle = load_data(data_reps[i]);
    NamedMatrix theta = read_csv((fit_reps[i] / "theta_hat.csv").string());
    if (theta.values.rows() != bundle.x.n())
      throw std::invalid_argument("theta_hat size does not match the data");
    RowPrecision rp = RowPrecision::from_theta(theta.values);
    DataMatrix star = decorrelate(bundle.x, rp);
    const fs::path out =
        nested ? fs::path(args.out) / data_reps[i].filename() : fs::path(args.out);
    fs::create_directories(out);
    write_csv((out / "X_star.csv").string(), star.values, star.column_labels);
    json meta;
    meta["command"] = "decorrelate";
    meta["data"] = data_reps[i].string();
    meta["fit"] = fit_reps[i].string();
    write_meta(out, meta);
  });
  return 0;
}

// ---------------------------------------------------------------------------
// eval / roc

struct EvalArgs {
  std::vector<std::string> fits;
  std::string truth;
  std::string out;
  double tau = -1.0;
  long match_count = -1;
  int num_thresholds = 50;
};

BoolMatrix truth_support(const fs::path& dir) {
  NamedMatrix b = read_csv((dir / "B.csv").string());
  BoolMatrix out(b.values.rows(), b.values.cols());
  for (Index j = 0; j < b.values.cols(); ++j)
    for (Index i = 0; i < b.values.rows(); ++i) out(i, j) = b.values(i, j) != 0.0;
  return out;
}

int cmd_eval(const EvalArgs& args) {
  if ((args.tau < 0.0) == (args.match_count < 0))
    throw std::invalid_argument("exactly one of --tau or --match-count is required");
  fs::create_directories(args.out);
  const auto truth_reps = replicate_dirs(args.truth);

  std::ofstream metrics(fs::path(args.out) / "metrics.csv");
  metrics << "method,rep,tau,P,TP,FP,FN,R,FDR,JI,SHD\n";
  std::ofstream aggregate(fs::path(args.out) / "aggregate.csv");
  aggregate << "method,P,TP,FP,FN,R,FDR,JI,SHD\n";

  for (const auto& fit_root : args.fits) {
    const std::string method = fs::path(fit_root).filename().string();
    const auto fit_reps = replicate_dirs(fit_root);
    if (fit_reps.size() != truth_reps.size())
      throw std::invalid_argument("fit and truth replicate counts differ for " + fit_root);

    double sum_p = 0, sum_tp = 0, sum_fp = 0, sum_fn = 0, sum_r = 0, sum_fdr = 0, sum_ji = 0,
           sum_shd = 0;
    for (std::size_t i = 0; i < fit_reps.size(); ++i) {
      NamedMatrix b_hat = read_csv((fit_reps[i] / "B_hat.csv").string());
      BoolMatrix truth = truth_support(truth_reps[i]);
      double tau = args.tau;
      if (args.match_count >= 0) {
        const long nnz = count_nonzero(b_hat.values);
        tau = nnz > 0 ? threshold_for_count(b_hat.values, std::min(nnz, args.match_count)) : 0.0;
      }
      EdgeConfusion c = confusion(threshold_dag(b_hat.values, tau), truth);
      metrics << method << ',' << i << ',' << format_double(tau) << ',' << c.predicted << ','
              << c.true_positive << ',' << c.false_positive << ',' << c.false_negative << ','
              << c.reversed << ',' << format_double(c.fdr()) << ',' << format_double(c.jaccard())
              << ',' << format_double(c.shd()) << '\n';
      sum_p += static_cast<double>(c.predicted);
      sum_tp += static_cast<double>(c.true_positive);
      sum_fp += static_cast<double>(c.false_positive);
      sum_fn += static_cast<double>(c.false_negative);
      sum_r += static_cast<double>(c.reversed);
      sum_fdr += c.fdr();
      sum_ji += c.jaccard();
      sum_shd += c.shd();
    }
    const auto m = static_cast<double>(fit_reps.size());
    char line[256];
    std::snprintf(line, sizeof line, "%s,%.1f,%.1f,%.1f,%.1f,%.1f,%.2f,%.2f,%.1f\n",
                  method.c_str(), sum_p / m, sum_tp / m, sum_fp / m, sum_fn / m, sum_r / m,
                  sum_fdr / m, sum_ji / m, sum_shd / m);
    aggregate << line;
  }

  json meta;
  meta["command"] = "eval";
  meta["truth"] = args.truth;
  meta["fits"] = args.fits;
  if (args.tau >= 0.0) meta["tau"] = args.tau;
  if (args.match_count >= 0) meta["match_count"] = args.match_count;
  write_meta(args.out, meta);
  return 0;
}

int cmd_roc(const EvalArgs& args) {
  fs::create_directories(args.out);
  const auto truth_reps = replicate_dirs(args.truth);

  std::ofstream roc(fs::path(args.out) / "roc.csv");
  roc << "method,rep,tau,fpr,tpr\n";
  json aucs;

  for (const auto& fit_root : args.fits) {
    const std::string method = fs::path(fit_root).filename().string();
    const auto fit_reps = replicate_dirs(fit_root);
    if (fit_reps.size() != truth_reps.size())
      throw std::invalid_argument("fit and truth replicate counts differ for " + fit_root);
    json method_aucs = json::array();
    for (std::size_t i = 0; i < fit_reps.size(); ++i) {
      NamedMatrix b_hat = read_csv((fit_reps[i] / "B_hat.csv").string());
      BoolMatrix truth = truth_support(truth_reps[i]);
      RocCurve curve = roc_sweep(b_hat.values, truth, args.num_thresholds);
      for (std::size_t k = 0; k < curve.points.size(); ++k)
        roc << method << ',' << i << ',' << format_double(curve.thresholds[k]) << ','
            << format_double(curve.points[k].first) << ','
            << format_double(curve.points[k].second) << '\n';
      method_aucs.push_back(curve.auc);
    }
    aucs[method] = method_aucs;
  }
  std::ofstream auc_out(fs::path(args.out) / "auc.json");
  auc_out << aucs.dump(2) << '\n';

  json meta;
  meta["command"] = "roc";
  meta["truth"] = args.truth;
  meta["fits"] = args.fits;
  meta["num_thresholds"] = args.num_thresholds;
  write_meta(args.out, meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Gaussian DAG learning from network-correlated observations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate ground-truth instances");
  sim_cmd->add_option("--n", sim.n, "Observation count (rows)");
  sim_cmd->add_option("--p", sim.p, "Variable count (columns)");
  sim_cmd->add_option("--edges", sim.edges, "Edge count (default 2p)");
  sim_cmd->add_option("--cov", sim.cov, "Row covariance family")
      ->check(CLI::IsMember({"toeplitz", "equicor", "star", "ar", "identity"}));
  sim_cmd->add_option("--block-size", sim.block_size, "Cluster size b");
  sim_cmd->add_option("--network-file", sim.network_file, "Undirected edge list for the rows");
  sim_cmd->add_option("--network-nodes", sim.network_nodes, "Subsampled node count");
  sim_cmd->add_option("--dag-file", sim.dag_file, "DAG edge list (parent child per line)");
  sim_cmd->add_option("--dag-copies", sim.dag_copies, "Block-diagonal copies of the DAG");
  sim_cmd->add_option("--replicates", sim.replicates, "Replicate count")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Seed (falls back to NETDAG_SEED)");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_option("--jobs", sim.jobs, "Parallel replicates");

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit at a fixed lambda1");
  fit_cmd->add_option("--data", fit_args.data, "Data directory (X.csv, mask.csv)")->required();
  fit_cmd->add_option("--out", fit_args.out, "Output directory")->required();
  fit_cmd->add_option("--lambda1", fit_args.lambda1, "DAG sparsity penalty")->required();
  fit_cmd->add_option("--lambda2", fit_args.lambda2, "Row precision penalty");
  fit_cmd->add_flag("--benchmark", fit_args.benchmark, "Hold the row precision at the identity");
  fit_cmd->add_option("--ordering-file", fit_args.ordering_file, "Node ordering file");
  fit_cmd->add_option("--tol", fit_args.tol, "Convergence threshold");
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "Iteration cap");
  fit_cmd->add_flag("--strict", fit_args.strict, "Fail on non-convergence");
  fit_cmd->add_option("--jobs", fit_args.jobs, "Parallel replicates");

  FitArgs path_args;
  auto* path_cmd = app.add_subcommand("path", "Solution path with BIC selection");
  path_cmd->add_option("--data", path_args.data, "Data directory")->required();
  path_cmd->add_option("--out", path_args.out, "Output directory")->required();
  path_cmd->add_option("--num-points", path_args.num_points, "Grid size")
      ->check(CLI::Range(2, 1000));
  path_cmd->add_option("--lambda2", path_args.lambda2, "Row precision penalty");
  path_cmd->add_flag("--benchmark", path_args.benchmark, "Hold the row precision at the identity");
  path_cmd->add_option("--ordering-file", path_args.ordering_file, "Node ordering file");
  path_cmd->add_option("--tol", path_args.tol, "Convergence threshold");
  path_cmd->add_option("--max-iter", path_args.max_iter, "Iteration cap");
  path_cmd->add_option("--jobs", path_args.jobs, "Parallel replicates");

  DecorrelateArgs dec;
  auto* dec_cmd = app.add_subcommand("decorrelate", "Export whitened data for external learners");
  dec_cmd->add_option("--data", dec.data, "Data directory")->required();
  dec_cmd->add_option("--fit", dec.fit, "Fit directory (theta_hat.csv)")->required();
  dec_cmd->add_option("--out", dec.out, "Output directory")->required();
  dec_cmd->add_option("--jobs", dec.jobs, "Parallel replicates");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Structure-recovery metrics");
  eval_cmd->add_option("--fit", eval_args.fits, "Fit directories (one per method)")->required();
  eval_cmd->add_option("--truth", eval_args.truth, "Ground-truth directory")->required();
  eval_cmd->add_option("--out", eval_args.out, "Output directory")->required();
  eval_cmd->add_option("--tau", eval_args.tau, "Hard threshold");
  eval_cmd->add_option("--match-count", eval_args.match_count, "Match predicted edge count");

  EvalArgs roc_args;
  auto* roc_cmd = app.add_subcommand("roc", "ROC sweep over thresholds");
  roc_cmd->add_option("--fit", roc_args.fits, "Fit directories (one per method)")->required();
  roc_cmd->add_option("--truth", roc_args.truth, "Ground-truth directory")->required();
  roc_cmd->add_option("--out", roc_args.out, "Output directory")->required();
  roc_cmd->add_option("--num-thresholds", roc_args.num_thresholds, "Threshold cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (path_cmd->parsed()) return cmd_path(path_args);
    if (dec_cmd->parsed()) return cmd_decorrelate(dec);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (roc_cmd->parsed()) return cmd_roc(roc_args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
