#pragma once

#include <cstdint>

#include "permexp/model.hpp"
#include "permexp/rng.hpp"

namespace permexp {

enum class SamplerMethod { gibbs, hit_and_run, uniform };

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::gibbs;
  int sweeps = 10;
  // 0 means the per-method default: n*n pair proposals per sweep for gibbs,
  // one full auxiliary-variable pass for hit-and-run.
  long long proposals_per_sweep = 0;
  std::uint64_t seed = 0;
};

SamplerMethod sampler_method_from_name(const std::string& name);

// Exact uniform draw over S_n (Fisher-Yates with unbiased exchange indices).
Permutation uniform_permutation(int n, Rng& rng);

// One heat-bath move on the unordered pair of positions {i, j} (0-indexed):
// keeps the current assignment with probability
// e^{theta.y_pi(i,j)} / (1 + e^{theta.y_pi(i,j)}) and swaps otherwise.
// Leaves P_{n,theta} invariant.
Permutation gibbs_step(const StatisticSpec& spec, const ThetaVector& theta,
                       const Permutation& pi, int i, int j, Rng& rng);

// Random-scan transposition Gibbs chain started from a uniform permutation.
Permutation gibbs_sample(const StatisticSpec& spec, const ThetaVector& theta,
                         int n, const SamplerConfig& config, Rng& rng);

// Auxiliary-variable / hit-and-run sampler for the rank-correlation model
// f(x,y) = xy with scalar theta > 0. Each pass draws U_i uniform on
// [0, e^{(theta/n^2) i pi(i)}], sets b_j = max{(n^2/(theta j)) log U_j, 1},
// and reassigns ranks 1..n greedily, choosing uniformly among the unused
// indices with b_j <= rank. theta = 0 falls back to a uniform draw.
Permutation hit_and_run_sample(double theta, int n, const SamplerConfig& config,
                               Rng& rng);

// Dispatches on config.method; validates that hit-and-run is only used for
// the scalar xy statistic with theta >= 0.
Permutation sample_permutation(const StatisticSpec& spec, const ThetaVector& theta,
                               int n, const SamplerConfig& config, Rng& rng);

// Seeds the stream from config.seed.
Permutation sample_permutation(const StatisticSpec& spec, const ThetaVector& theta,
                               int n, const SamplerConfig& config);

}  // namespace permexp
