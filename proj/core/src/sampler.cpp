#include "permexp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "permexp/logistic.hpp"

namespace permexp {

SamplerMethod sampler_method_from_name(const std::string& name) {
  if (name == "gibbs") return SamplerMethod::gibbs;
  if (name == "har" || name == "hit_and_run") return SamplerMethod::hit_and_run;
  if (name == "uniform") return SamplerMethod::uniform;
  throw Error(ErrorCode::invalid_argument, "unknown sampler method: " + name);
}

Permutation uniform_permutation(int n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be >= 1");
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(img[i], img[j]);
  }
  return Permutation(std::move(img));
}

namespace {

// Heat-bath move on raw images; the hot path shared by gibbs_step and
// gibbs_sample.
inline void gibbs_step_inplace(const StatisticSpec& spec, const ThetaVector& theta,
                               std::vector<int>& img, int n, int i, int j, Rng& rng) {
  const double xi = static_cast<double>(i + 1) / n;
  const double xj = static_cast<double>(j + 1) / n;
  const double yi = static_cast<double>(img[i] + 1) / n;
  const double yj = static_cast<double>(img[j] + 1) / n;
  double dot = 0.0;
  for (int r = 0; r < spec.dimension(); ++r)
    dot += theta[r] * g_kernel_component(spec, r, xi, yi, xj, yj);
  // Keep with probability e^dot / (1 + e^dot).
  const double p_keep = inv_one_plus_exp(-dot);
  if (rng.uniform01() >= p_keep) std::swap(img[i], img[j]);
}

}  // namespace

Permutation gibbs_step(const StatisticSpec& spec, const ThetaVector& theta,
                       const Permutation& pi, int i, int j, Rng& rng) {
  if (i == j) throw Error(ErrorCode::invalid_argument, "gibbs_step requires i != j");
  if (theta.size() != spec.dimension())
    throw Error(ErrorCode::dimension_mismatch, "theta dimension != statistic dimension");
  std::vector<int> img = pi.images();
  gibbs_step_inplace(spec, theta, img, pi.size(), i, j, rng);
  return Permutation(std::move(img));
}

Permutation gibbs_sample(const StatisticSpec& spec, const ThetaVector& theta,
                         int n, const SamplerConfig& config, Rng& rng) {
  if (config.sweeps < 1)
    throw Error(ErrorCode::invalid_argument, "sweeps must be >= 1");
  Permutation start = uniform_permutation(n, rng);
  if (n == 1) return start;
  std::vector<int> img = start.images();
  const long long per_sweep = config.proposals_per_sweep > 0
                                  ? config.proposals_per_sweep
                                  : static_cast<long long>(n) * n;
  const std::uint64_t n_ordered = static_cast<std::uint64_t>(n) * (n - 1);
  for (int s = 0; s < config.sweeps; ++s) {
    for (long long p = 0; p < per_sweep; ++p) {
      // Uniform ordered pair (i, j), i != j; the move is symmetric in (i, j).
      const std::uint64_t r = rng.uniform_below(n_ordered);
      const int i = static_cast<int>(r / (n - 1));
      int j = static_cast<int>(r % (n - 1));
      if (j >= i) ++j;
      gibbs_step_inplace(spec, theta, img, n, i, j, rng);
    }
  }
  return Permutation(std::move(img));
}

Permutation hit_and_run_sample(double theta, int n, const SamplerConfig& config,
                               Rng& rng) {
  if (config.sweeps < 1)
    throw Error(ErrorCode::invalid_argument, "sweeps must be >= 1");
  if (theta < 0.0)
    throw Error(ErrorCode::invalid_argument,
                "hit_and_run_sample requires theta >= 0; use gibbs for theta < 0");
  if (theta == 0.0) return uniform_permutation(n, rng);

  std::vector<int> img = uniform_permutation(n, rng).images();
  std::vector<double> b(n);
  std::vector<int> order(n), pool;
  std::vector<int> next(n);
  const double n2 = static_cast<double>(n) * n;

  for (int pass = 0; pass < config.sweeps; ++pass) {
    // U_j uniform on [0, e^{(theta/n^2) j pi(j)}] drawn as
    // U_j = V_j e^{(theta/n^2) j pi(j)}, so (n^2/(theta j)) log U_j
    // = pi(j) + (n^2 log V_j)/(theta j) without forming the exponential.
    for (int j0 = 0; j0 < n; ++j0) {
      const double j1 = j0 + 1;
      const double piv = img[j0] + 1;
      const double log_v = std::log(rng.uniform01());
      b[j0] = std::max(piv + n2 * log_v / (theta * j1), 1.0);
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int u, int v) {
      return b[u] != b[v] ? b[u] < b[v] : u < v;
    });
    pool.clear();
    int ptr = 0;
    for (int rank = 1; rank <= n; ++rank) {
      while (ptr < n && b[order[ptr]] <= static_cast<double>(rank)) {
        pool.push_back(order[ptr]);
        ++ptr;
      }
      if (pool.empty())
        throw std::logic_error("hit_and_run_sample: empty eligible set (bug)");
      const std::size_t pick = rng.uniform_below(pool.size());
      next[pool[pick]] = rank - 1;
      pool[pick] = pool.back();
      pool.pop_back();
    }
    img = next;
  }
  return Permutation(std::move(img));
}

Permutation sample_permutation(const StatisticSpec& spec, const ThetaVector& theta,
                               int n, const SamplerConfig& config, Rng& rng) {
  if (theta.size() != spec.dimension())
    throw Error(ErrorCode::dimension_mismatch, "theta dimension != statistic dimension");
  switch (config.method) {
    case SamplerMethod::uniform:
      return uniform_permutation(n, rng);
    case SamplerMethod::gibbs:
      return gibbs_sample(spec, theta, n, config, rng);
    case SamplerMethod::hit_and_run: {
      const bool is_xy = spec.dimension() == 1 &&
                         std::holds_alternative<Builtin>(spec.component(0)) &&
                         std::get<Builtin>(spec.component(0)) == Builtin::xy;
      if (!is_xy)
        throw Error(ErrorCode::invalid_argument,
                    "hit_and_run is only valid for the scalar xy statistic");
      return hit_and_run_sample(theta[0], n, config, rng);
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown sampler method");
}

Permutation sample_permutation(const StatisticSpec& spec, const ThetaVector& theta,
                               int n, const SamplerConfig& config) {
  Rng rng(config.seed);
  return sample_permutation(spec, theta, n, config, rng);
}

}  // namespace permexp
