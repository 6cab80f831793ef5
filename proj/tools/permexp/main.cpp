// permexp: simulation and inference for the permutation exponential family.
// Subcommands: sample, ple, ci, mle0, limiting, oracle, experiment.
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "experiment.hpp"
#include "permexp/limiting.hpp"
#include "permexp/mle_origin.hpp"
#include "permexp/oracle.hpp"
#include "permexp/parallel.hpp"
#include "permexp/variance.hpp"

using nlohmann::json;
using namespace permexp;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  bool json_flag = false;
  bool csv_flag = false;
};

StatisticSpec load_stat(const std::string& name, bool center, int center_resolution) {
  StatisticSpec spec = (name.find('/') != std::string::npos ||
                        name.find(".tab") != std::string::npos)
                           ? read_tabulated_file(name)
                           : StatisticSpec::from_name(name);
  return center ? center_components(spec, center_resolution) : spec;
}

// Estimation requires an identifiable model.
void require_linear_independence(const StatisticSpec& spec) {
  const double lambda_min = check_linear_independence(spec, 512);
  if (lambda_min <= kLinearIndependenceTol)
    throw Error(ErrorCode::degenerate,
                "statistic components are linearly dependent (Gram lambda_min = " +
                    std::to_string(lambda_min) + ")");
}

ThetaVector parse_theta(const std::string& text, int expected_dim) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (expected_dim > 0 && static_cast<int>(vals.size()) != expected_dim)
    throw Error(ErrorCode::dimension_mismatch,
                "theta has " + std::to_string(vals.size()) + " entries, statistic needs " +
                    std::to_string(expected_dim));
  ThetaVector theta(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) theta[i] = vals[i];
  return theta;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

void emit(const GlobalOpts& g, const std::string& payload) {
  if (g.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + g.out);
  out << payload;
}

Permutation load_single_permutation(const std::string& path) {
  const auto pis = read_permutations_file(path);
  if (pis.empty()) throw Error(ErrorCode::io_error, "no permutation in " + path);
  if (pis.size() > 1)
    std::cerr << "permexp: " << path << " has " << pis.size()
              << " permutations; using the first\n";
  return pis.front();
}

json solve_report_to_json(const SolveReport& report) {
  return json{{"root", vector_to_json(report.root)},
              {"iterations", report.iterations},
              {"grad_norm_scaled", report.grad_norm_scaled},
              {"converged", report.converged},
              {"hessian_cond", report.hessian_cond}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and pseudo-likelihood inference for exponential families on permutations"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand name

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_flag("--json", g.json_flag, "JSON output (reports default to JSON)");
  app.add_flag("--csv", g.csv_flag, "CSV output (experiments default to CSV)");

  std::string stat = "xy";
  std::string theta_text = "0";
  bool center = false;

  // sample
  auto* sample = app.add_subcommand("sample", "draw permutations from P_{n,theta}");
  int sample_n = 100, sample_sweeps = 10, sample_reps = 1;
  std::string sample_method = "gibbs";
  sample->add_option("--stat", stat, "statistic name or tabulated file");
  sample->add_option("--theta", theta_text, "theta (comma separated for L > 1)");
  sample->add_option("--n", sample_n, "permutation size")->check(CLI::PositiveNumber);
  sample->add_option("--method", sample_method, "gibbs | har | uniform");
  sample->add_option("--sweeps", sample_sweeps, "MCMC sweeps");
  sample->add_option("--reps", sample_reps, "number of permutations");
  sample->add_flag("--center", center, "center the statistic first");

  // ple
  auto* ple = app.add_subcommand("ple", "pseudo-likelihood estimate from one permutation");
  std::string perm_path;
  std::string theta_init_text = "";
  double tol = 1e-10;
  ple->add_option("--stat", stat, "statistic name or tabulated file");
  ple->add_option("--perm", perm_path, "permutation file")->required();
  ple->add_option("--theta-init", theta_init_text, "Newton start (default 0)");
  ple->add_option("--tol", tol, "scaled-gradient tolerance");
  ple->add_flag("--center", center, "center the statistic first");

  // ci
  auto* ci = app.add_subcommand("ci", "sandwich confidence interval for d'theta");
  std::string d_text = "1";
  double alpha = 0.05;
  ci->add_option("--stat", stat, "statistic name or tabulated file");
  ci->add_option("--perm", perm_path, "permutation file")->required();
  ci->add_option("--d", d_text, "direction vector (comma separated)");
  ci->add_option("--alpha", alpha, "level in (0,1)");
  ci->add_flag("--center", center, "center the statistic first");

  // mle0
  auto* mle0 = app.add_subcommand("mle0", "approximate MLE linearized at theta = 0");
  bool paper_gamma = false;
  mle0->add_option("--stat", stat, "statistic name or tabulated file");
  mle0->add_option("--perm", perm_path, "permutation file")->required();
  mle0->add_flag("--paper-gamma", paper_gamma,
                 "use the raw second moment instead of the Hoeffding variance (scalar)");
  mle0->add_flag("--center", center, "center the statistic first");

  // limiting
  auto* limiting = app.add_subcommand("limiting", "Sinkhorn coupling and asymptotic matrices");
  int grid_m = 256;
  double sink_tol = 1e-10;
  limiting->add_option("--stat", stat, "statistic name or tabulated file");
  limiting->add_option("--theta", theta_text, "theta (comma separated for L > 1)");
  limiting->add_option("--grid", grid_m, "grid resolution")->check(CLI::PositiveNumber);
  limiting->add_option("--tol", sink_tol, "marginal tolerance");
  limiting->add_flag("--center", center, "center the statistic first");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "exact enumeration at n <= 8");
  int oracle_n = 5;
  bool skip_pairs = false;
  oracle_cmd->add_option("--stat", stat, "statistic name or tabulated file");
  oracle_cmd->add_option("--theta", theta_text, "theta (comma separated for L > 1)");
  oracle_cmd->add_option("--n", oracle_n, "permutation size (<= 8)");
  oracle_cmd->add_flag("--no-pair-marginals", skip_pairs, "omit the pair-marginal table");
  oracle_cmd->add_flag("--center", center, "center the statistic first");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo harness (CSV + JSON sidecar)");
  std::string config_path, experiment_name, n_list_text, exp_method;
  int reps = 0, sweeps = 0;
  double theta0 = std::numeric_limits<double>::quiet_NaN();
  double exp_alpha = std::numeric_limits<double>::quiet_NaN();
  int exp_grid = 0;
  bool paper_scale = false;
  experiment->add_option("--config", config_path, "key=value config file");
  experiment->add_option("--experiment", experiment_name,
                         "ple_histogram | mle_vs_ple_origin | ci_coverage");
  experiment->add_option("--stat", stat, "statistic name or tabulated file");
  experiment->add_option("--theta0", theta0, "true parameter");
  experiment->add_option("--n", n_list_text, "comma separated n values");
  experiment->add_option("--reps", reps, "replications");
  experiment->add_option("--sweeps", sweeps, "sampler sweeps");
  experiment->add_option("--method", exp_method, "auto | gibbs | har | uniform");
  experiment->add_option("--alpha", exp_alpha, "CI level (ci_coverage)");
  experiment->add_option("--grid", exp_grid, "overlay grid resolution");
  experiment->add_flag("--paper-scale", paper_scale,
                       "restore the full-scale settings (2000 reps, paper n grid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*sample) {
      const auto spec = load_stat(stat, center, 512);
      const auto theta = parse_theta(theta_text, spec.dimension());
      SamplerConfig cfg;
      cfg.method = sampler_method_from_name(sample_method);
      cfg.sweeps = sample_sweeps;
      std::ostringstream lines;
      for (int rep = 0; rep < sample_reps; ++rep) {
        cfg.seed = derive_stream_seed(g.seed, rep);
        write_permutation_line(lines, sample_permutation(spec, theta, sample_n, cfg));
      }
      emit(g, lines.str());
    } else if (*ple) {
      const auto spec = load_stat(stat, center, 512);
      require_linear_independence(spec);
      const auto pi = load_single_permutation(perm_path);
      SolveOptions opts;
      opts.tol = tol;
      const ThetaVector init = theta_init_text.empty()
                                   ? ThetaVector::Zero(spec.dimension())
                                   : parse_theta(theta_init_text, spec.dimension());
      const auto report = solve_ple(spec, pi, init, opts);
      emit(g, solve_report_to_json(report).dump(2) + "\n");
    } else if (*ci) {
      const auto spec = load_stat(stat, center, 512);
      require_linear_independence(spec);
      const auto pi = load_single_permutation(perm_path);
      const ThetaVector d = parse_theta(d_text, spec.dimension());
      const auto interval = confidence_interval(spec, pi, d, alpha);
      json out{{"theta_hat", vector_to_json(interval.solve.root)},
               {"point", interval.point},
               {"lo", interval.lo},
               {"hi", interval.hi},
               {"alpha", alpha},
               {"sandwich", matrix_to_json(interval.sandwich.sandwich)},
               {"sigma_hat", matrix_to_json(interval.sandwich.sigma_hat)},
               {"a_hat", matrix_to_json(interval.sandwich.a_hat)},
               {"solve", solve_report_to_json(interval.solve)}};
      emit(g, out.dump(2) + "\n");
    } else if (*mle0) {
      const auto spec = load_stat(stat, center, 512);
      const auto pi = load_single_permutation(perm_path);
      json out;
      out["n"] = pi.size();
      out["note"] = "valid only near theta = 0";
      if (paper_gamma)
        out["theta"] = json::array({approx_mle_origin_raw_gamma(spec, pi)});
      else
        out["theta"] = vector_to_json(approx_mle_origin(spec, pi));
      out["paper_gamma"] = paper_gamma;
      emit(g, out.dump(2) + "\n");
    } else if (*limiting) {
      const auto spec = load_stat(stat, center, 512);
      const auto theta = parse_theta(theta_text, spec.dimension());
      SinkhornOptions opts;
      opts.tol = sink_tol;
      const auto grid = sinkhorn_density(spec, theta, grid_m, opts);
      Eigen::MatrixXd sigma, a;
      sigma_a_matrices(grid, spec, theta, &sigma, &a, g.threads);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
      const Eigen::MatrixXd a_inv = es.eigenvectors() *
                                    es.eigenvalues().cwiseInverse().asDiagonal() *
                                    es.eigenvectors().transpose();
      // Gamma is defined for doubly centered statistics; report it for the centered
      // projection (Sigma, A, and the sandwich are centering-invariant).
      const auto centered = spec.centered() ? spec : center_components(spec, grid_m);
      json out{{"theta", vector_to_json(theta)},
               {"grid", grid_m},
               {"Z", limiting_log_partition(grid, spec, theta)},
               {"z", vector_to_json(limiting_z_vector(grid, spec))},
               {"Sigma", matrix_to_json(sigma)},
               {"A", matrix_to_json(a)},
               {"sandwich", matrix_to_json(a_inv * sigma * a_inv)},
               {"Gamma", matrix_to_json(gamma_matrix(centered, grid_m))},
               {"marginal_error", grid.marginal_error},
               {"iterations", grid.iterations}};
      emit(g, out.dump(2) + "\n");
    } else if (*oracle_cmd) {
      const auto spec = load_stat(stat, center, 512);
      const auto theta = parse_theta(theta_text, spec.dimension());
      const ExactModel model(spec, oracle_n);
      json out{{"n", oracle_n},
               {"log_Z", model.log_partition(theta)},
               {"mean_T", vector_to_json(model.mean(theta))},
               {"var_T", matrix_to_json(model.variance(theta))}};
      if (!skip_pairs) out["pair_marginals"] = model.pair_marginals(theta);
      emit(g, out.dump(2) + "\n");
    } else if (*experiment) {
      harness::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = harness::parse_config_file(config_path);
      if (experiment->count("--experiment"))
        cfg.experiment = harness::experiment_kind_from_name(experiment_name);
      if (paper_scale) cfg.apply_paper_scale();
      if (experiment->count("--stat")) cfg.stat = stat;
      if (experiment->count("--theta0")) cfg.theta0 = theta0;
      if (experiment->count("--n")) {
        cfg.n_values.clear();
        std::stringstream ss(n_list_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.n_values.push_back(std::stoi(tok));
      }
      if (experiment->count("--reps")) cfg.replications = reps;
      if (experiment->count("--sweeps")) cfg.sweeps = sweeps;
      if (experiment->count("--method")) cfg.method = exp_method;
      if (experiment->count("--alpha")) cfg.alpha = exp_alpha;
      if (experiment->count("--grid")) cfg.grid = exp_grid;
      if (app.count("--seed")) cfg.seed = g.seed;
      if (app.count("--threads")) cfg.threads = g.threads;
      if (app.count("--out")) cfg.out = g.out;
      const auto result = harness::run_experiment(cfg);
      harness::write_result(cfg, result, std::cout);
      if (!cfg.out.empty())
        std::cerr << "permexp: wrote " << result.rows << " rows to " << cfg.out
                  << " (+ sidecar)\n";
    }
  } catch (const Error& e) {
    std::cerr << "permexp: error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "permexp: error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
