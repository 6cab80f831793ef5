#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "permexp/sampler.hpp"

namespace permexp::harness {

enum class ExperimentKind { ple_histogram, mle_vs_ple_origin, ci_coverage };

ExperimentKind experiment_kind_from_name(const std::string& name);
std::string to_string(ExperimentKind kind);

// Flat key=value config; CLI flags override file values.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ple_histogram;
  std::string stat = "xy";
  double theta0 = 2.0;
  std::vector<int> n_values = {500, 2000};
  int replications = 400;
  int sweeps = 10;
  std::string method = "auto";  // auto | gibbs | har | uniform
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware
  int grid = 256;   // resolution for theoretical overlays
  std::string out;  // empty = stdout

  // Full-scale study settings: 2000 replications and the complete n grids.
  void apply_paper_scale();
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct ExperimentResult {
  std::string csv;            // full CSV payload, header included
  std::string sidecar_json;   // theoretical overlay / summary metadata
  long failures = 0;          // per-replication solver failures (recorded)
  long rows = 0;
};

// Sampling-distribution study: per (n, replication) sample at theta0 and solve the
// PLE. CSV columns: n,replication,theta_hat,converged. The sidecar carries
// the asymptotic sd prediction per n.
ExperimentResult run_ple_histogram(const ExperimentConfig& config);

// Estimator comparison at the origin: uniform permutations, both estimators.
// CSV columns: n,replication,estimator,value.
ExperimentResult run_mle_vs_ple_origin(const ExperimentConfig& config);

// Coverage study: CSV columns: replication,lo,hi,covered.
ExperimentResult run_ci_coverage(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes result.csv to config.out (stdout when empty) and the sidecar next
// to it (<out>.meta.json); returns the paths written.
void write_result(const ExperimentConfig& config, const ExperimentResult& result,
                  std::ostream& fallback);

}  // namespace permexp::harness
