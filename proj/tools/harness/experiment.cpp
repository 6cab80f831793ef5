#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "permexp/limiting.hpp"
#include "permexp/mle_origin.hpp"
#include "permexp/parallel.hpp"
#include "permexp/variance.hpp"

namespace permexp::harness {

using nlohmann::json;

ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "ple_histogram") return ExperimentKind::ple_histogram;
  if (name == "mle_vs_ple_origin") return ExperimentKind::mle_vs_ple_origin;
  if (name == "ci_coverage") return ExperimentKind::ci_coverage;
  throw Error(ErrorCode::invalid_argument, "unknown experiment: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ple_histogram: return "ple_histogram";
    case ExperimentKind::mle_vs_ple_origin: return "mle_vs_ple_origin";
    case ExperimentKind::ci_coverage: return "ci_coverage";
  }
  return "?";
}

void ExperimentConfig::apply_paper_scale() {
  replications = 2000;
  switch (experiment) {
    case ExperimentKind::ple_histogram:
      n_values = {500, 2000, 8000};
      break;
    case ExperimentKind::mle_vs_ple_origin:
      n_values = {1000, 2000, 4000, 8000};
      theta0 = 0.0;
      break;
    case ExperimentKind::ci_coverage:
      n_values = {1000};
      replications = 100;
      break;
  }
}

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "empty n list");
  return out;
}

std::string format_int_list(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

// Shortest decimal digits that round-trip.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back;
  std::sscanf(buf, "%lf", &back);
  for (int prec = 1; prec <= 16; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return buf;
}

void validate(const ExperimentConfig& c) {
  if (c.replications < 1)
    throw Error(ErrorCode::invalid_argument, "replications must be >= 1");
  for (int n : c.n_values)
    if (n < 2) throw Error(ErrorCode::invalid_argument, "all n must be >= 2");
  if (!(c.alpha > 0.0 && c.alpha < 1.0))
    throw Error(ErrorCode::invalid_argument, "alpha must be in (0,1)");
  if (c.sweeps < 1) throw Error(ErrorCode::invalid_argument, "sweeps must be >= 1");
}

StatisticSpec resolve_stat(const std::string& name) {
  if (name.find('/') != std::string::npos || name.find(".tab") != std::string::npos)
    return read_tabulated_file(name);
  return StatisticSpec::from_name(name);
}

SamplerMethod resolve_method(const ExperimentConfig& c, const StatisticSpec& spec) {
  if (c.method != "auto") return sampler_method_from_name(c.method);
  if (c.theta0 == 0.0) return SamplerMethod::uniform;
  const bool scalar_xy = spec.dimension() == 1 &&
                         std::holds_alternative<Builtin>(spec.component(0)) &&
                         std::get<Builtin>(spec.component(0)) == Builtin::xy;
  return scalar_xy && c.theta0 > 0.0 ? SamplerMethod::hit_and_run
                                     : SamplerMethod::gibbs;
}

Permutation draw(const ExperimentConfig& c, const StatisticSpec& spec,
                 SamplerMethod method, int n, std::uint64_t stream_seed) {
  SamplerConfig sampler;
  sampler.method = method;
  sampler.sweeps = c.sweeps;
  sampler.seed = stream_seed;
  ThetaVector theta(spec.dimension());
  theta.setConstant(c.theta0);
  if (spec.dimension() != 1)
    throw Error(ErrorCode::invalid_argument,
                "experiments drive scalar models; use the library for L > 1");
  return sample_permutation(spec, theta, n, sampler);
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_failures(long failures, long total) {
  if (failures * 100 > total)
    throw Error(ErrorCode::too_many_failures,
                "more than 1% of replications failed (" + std::to_string(failures) +
                    "/" + std::to_string(total) + ")");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw Error(ErrorCode::io_error,
                  "config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") c.experiment = experiment_kind_from_name(value);
    else if (key == "stat") c.stat = value;
    else if (key == "theta0") c.theta0 = std::stod(value);
    else if (key == "n") c.n_values = parse_int_list(value);
    else if (key == "replications") c.replications = std::stoi(value);
    else if (key == "sweeps") c.sweeps = std::stoi(value);
    else if (key == "method") c.method = value;
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "threads") c.threads = std::stoi(value);
    else if (key == "grid") c.grid = std::stoi(value);
    else if (key == "out") c.out = value;
    else
      throw Error(ErrorCode::io_error, "unknown config key: " + key);
  }
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config: " + path);
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment=" << to_string(c.experiment) << '\n'
      << "stat=" << c.stat << '\n'
      << "theta0=" << format_double(c.theta0) << '\n'
      << "n=" << format_int_list(c.n_values) << '\n'
      << "replications=" << c.replications << '\n'
      << "sweeps=" << c.sweeps << '\n'
      << "method=" << c.method << '\n'
      << "alpha=" << format_double(c.alpha) << '\n'
      << "seed=" << c.seed << '\n'
      << "threads=" << c.threads << '\n'
      << "grid=" << c.grid << '\n';
  if (!c.out.empty()) out << "out=" << c.out << '\n';
  return out.str();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.experiment == b.experiment && a.stat == b.stat && a.theta0 == b.theta0 &&
         a.n_values == b.n_values && a.replications == b.replications &&
         a.sweeps == b.sweeps && a.method == b.method && a.alpha == b.alpha &&
         a.seed == b.seed && a.threads == b.threads && a.grid == b.grid &&
         a.out == b.out;
}

ExperimentResult run_ple_histogram(const ExperimentConfig& config) {
  validate(config);
  const auto spec = resolve_stat(config.stat);
  const auto method = resolve_method(config, spec);

  ExperimentResult result;
  std::ostringstream csv;
  csv << "n,replication,theta_hat,converged\n";

  json sidecar;
  sidecar["experiment"] = "ple_histogram";
  sidecar["theta0"] = config.theta0;
  sidecar["config"] = serialize_config(config);

  // Asymptotic overlay: sd(theta_hat) ~ sqrt(sandwich / n).
  {
    ThetaVector theta(1);
    theta[0] = config.theta0;
    const auto grid = sinkhorn_density(spec, theta, config.grid);
    const double v = asymptotic_ple_cov(grid, spec, theta, config.threads)(0, 0);
    sidecar["sandwich_limit"] = v;
    sidecar["marginal_error"] = grid.marginal_error;
    json per_n = json::object();
    for (int n : config.n_values)
      per_n[std::to_string(n)] = std::sqrt(v / n);
    sidecar["asymptotic_sd"] = per_n;
  }

  for (std::size_t n_idx = 0; n_idx < config.n_values.size(); ++n_idx) {
    const int n = config.n_values[n_idx];
    const std::uint64_t n_seed = derive_stream_seed(config.seed, 1000003ull * n_idx);
    struct Row {
      double theta_hat = kNan;
      bool converged = false;
    };
    std::vector<Row> rows(config.replications);
    run_tiles(config.replications, config.threads, [&](std::size_t rep) {
      try {
        const auto pi = draw(config, spec, method, n, derive_stream_seed(n_seed, rep));
        const auto report = solve_ple(spec, pi);
        rows[rep].theta_hat = report.root[0];
        rows[rep].converged = report.converged;
      } catch (const Error&) {
        // recorded as a failed replication
      }
    });
    for (int rep = 0; rep < config.replications; ++rep) {
      if (!rows[rep].converged) ++result.failures;
      csv << n << ',' << rep << ',' << format_double(rows[rep].theta_hat) << ','
          << (rows[rep].converged ? 1 : 0) << '\n';
      ++result.rows;
    }
  }
  check_failures(result.failures, result.rows);
  result.csv = csv.str();
  result.sidecar_json = sidecar.dump(2) + "\n";
  return result;
}

ExperimentResult run_mle_vs_ple_origin(const ExperimentConfig& config) {
  validate(config);
  const auto spec = resolve_stat(config.stat);

  ExperimentResult result;
  std::ostringstream csv;
  csv << "n,replication,estimator,value\n";

  json sidecar;
  sidecar["experiment"] = "mle_vs_ple_origin";
  sidecar["config"] = serialize_config(config);
  json per_n = json::object();

  for (std::size_t n_idx = 0; n_idx < config.n_values.size(); ++n_idx) {
    const int n = config.n_values[n_idx];
    const auto calib = make_origin_calibration(spec, n);
    per_n[std::to_string(n)] = std::sqrt(1.0 / (n * calib.gamma_n(0, 0)));
    const std::uint64_t n_seed = derive_stream_seed(config.seed, 1000003ull * n_idx);
    struct Row {
      double mle0 = kNan;
      double ple = kNan;
      bool ok = false;
    };
    std::vector<Row> rows(config.replications);
    run_tiles(config.replications, config.threads, [&](std::size_t rep) {
      try {
        Rng rng(derive_stream_seed(n_seed, rep));
        const auto pi = uniform_permutation(n, rng);
        rows[rep].mle0 = approx_mle_origin(calib, spec, pi)[0];
        const auto report = solve_ple(spec, pi);
        rows[rep].ple = report.root[0];
        rows[rep].ok = report.converged;
      } catch (const Error&) {
      }
    });
    for (int rep = 0; rep < config.replications; ++rep) {
      if (!rows[rep].ok) ++result.failures;
      csv << n << ',' << rep << ",mle0," << format_double(rows[rep].mle0) << '\n';
      csv << n << ',' << rep << ",ple," << format_double(rows[rep].ple) << '\n';
      result.rows += 2;
    }
  }
  check_failures(result.failures, result.rows / 2);
  sidecar["asymptotic_sd"] = per_n;  // sqrt(Gamma_n^{-1} / n) per n
  result.csv = csv.str();
  result.sidecar_json = sidecar.dump(2) + "\n";
  return result;
}

ExperimentResult run_ci_coverage(const ExperimentConfig& config) {
  validate(config);
  const auto spec = resolve_stat(config.stat);
  const auto method = resolve_method(config, spec);
  const int n = config.n_values.front();

  ExperimentResult result;
  std::ostringstream csv;
  csv << "replication,lo,hi,covered\n";

  struct Row {
    double lo = kNan, hi = kNan;
    bool covered = false, ok = false;
  };
  std::vector<Row> rows(config.replications);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
  const std::uint64_t n_seed = derive_stream_seed(config.seed, 0);
  run_tiles(config.replications, config.threads, [&](std::size_t rep) {
    try {
      const auto pi = draw(config, spec, method, n, derive_stream_seed(n_seed, rep));
      const auto ci = confidence_interval(spec, pi, d, config.alpha);
      rows[rep].lo = ci.lo;
      rows[rep].hi = ci.hi;
      rows[rep].covered = ci.lo <= config.theta0 && config.theta0 <= ci.hi;
      rows[rep].ok = true;
    } catch (const Error&) {
    }
  });
  long covered = 0;
  for (int rep = 0; rep < config.replications; ++rep) {
    if (!rows[rep].ok) ++result.failures;
    if (rows[rep].covered) ++covered;
    csv << rep << ',' << format_double(rows[rep].lo) << ','
        << format_double(rows[rep].hi) << ',' << (rows[rep].covered ? 1 : 0) << '\n';
    ++result.rows;
  }
  check_failures(result.failures, result.rows);

  json sidecar;
  sidecar["experiment"] = "ci_coverage";
  sidecar["config"] = serialize_config(config);
  sidecar["n"] = n;
  sidecar["covered"] = covered;
  sidecar["nominal"] = 1.0 - config.alpha;
  result.csv = csv.str();
  result.sidecar_json = sidecar.dump(2) + "\n";
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::ple_histogram: return run_ple_histogram(config);
    case ExperimentKind::mle_vs_ple_origin: return run_mle_vs_ple_origin(config);
    case ExperimentKind::ci_coverage: return run_ci_coverage(config);
  }
  throw Error(ErrorCode::invalid_argument, "unknown experiment");
}

void write_result(const ExperimentConfig& config, const ExperimentResult& result,
                  std::ostream& fallback) {
  if (config.out.empty()) {
    fallback << result.csv;
    return;
  }
  std::ofstream out(config.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + config.out);
  out << result.csv;
  std::ofstream meta(config.out + ".meta.json", std::ios::binary);
  if (!meta) throw Error(ErrorCode::io_error, "cannot write sidecar for " + config.out);
  meta << result.sidecar_json;
}

}  // namespace permexp::harness
