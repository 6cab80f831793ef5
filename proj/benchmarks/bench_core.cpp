#include <benchmark/benchmark.h>

#include "permexp/limiting.hpp"
#include "permexp/pseudolikelihood.hpp"
#include "permexp/sampler.hpp"
#include "permexp/variance.hpp"

using namespace permexp;

namespace {

ThetaVector scalar_theta(double t) {
  ThetaVector th(1);
  th[0] = t;
  return th;
}

Permutation fixture_perm(int n) {
  Rng rng(1234);
  return uniform_permutation(n, rng);
}

void BM_pl_eval(benchmark::State& state) {
  const auto xy = StatisticSpec::from_name("xy");
  const int n = static_cast<int>(state.range(0));
  const PlObjective obj(xy, fixture_perm(n));
  const auto theta = scalar_theta(1.5);
  double f;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  for (auto _ : state) {
    obj.eval(theta, &f, &g, &h);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * (static_cast<long>(n) * (n - 1) / 2));
}
BENCHMARK(BM_pl_eval)->Arg(500)->Arg(2000);

void BM_solve_ple(benchmark::State& state) {
  const auto xy = StatisticSpec::from_name("xy");
  const int n = static_cast<int>(state.range(0));
  SamplerConfig cfg;
  Rng rng(99);
  const auto pi = hit_and_run_sample(2.0, n, cfg, rng);
  for (auto _ : state) {
    auto report = solve_ple(xy, pi);
    benchmark::DoNotOptimize(report.root);
  }
}
BENCHMARK(BM_solve_ple)->Arg(500)->Arg(2000);

void BM_sigma_hat(benchmark::State& state) {
  const auto xy = StatisticSpec::from_name("xy");
  const int n = static_cast<int>(state.range(0));
  const auto pi = fixture_perm(n);
  const auto theta = scalar_theta(2.0);
  for (auto _ : state) {
    auto s = sigma_hat(xy, pi, theta);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n) * n);
}
BENCHMARK(BM_sigma_hat)->Arg(500)->Arg(2000);

void BM_gibbs_sweeps(benchmark::State& state) {
  const auto xy = StatisticSpec::from_name("xy");
  const int n = static_cast<int>(state.range(0));
  const auto theta = scalar_theta(1.0);
  SamplerConfig cfg;
  cfg.sweeps = 10;
  Rng rng(7);
  for (auto _ : state) {
    auto pi = gibbs_sample(xy, theta, n, cfg, rng);
    benchmark::DoNotOptimize(pi);
  }
  state.SetItemsProcessed(state.iterations() * 10l * n * n);
}
BENCHMARK(BM_gibbs_sweeps)->Arg(100)->Arg(300);

void BM_hit_and_run(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SamplerConfig cfg;
  Rng rng(7);
  for (auto _ : state) {
    auto pi = hit_and_run_sample(2.0, n, cfg, rng);
    benchmark::DoNotOptimize(pi);
  }
}
BENCHMARK(BM_hit_and_run)->Arg(1000)->Arg(8000);

void BM_sinkhorn(benchmark::State& state) {
  const auto xy = StatisticSpec::from_name("xy");
  const int m = static_cast<int>(state.range(0));
  const auto theta = scalar_theta(2.0);
  for (auto _ : state) {
    auto grid = sinkhorn_density(xy, theta, m);
    benchmark::DoNotOptimize(grid.density);
  }
}
BENCHMARK(BM_sinkhorn)->Arg(64)->Arg(256);

void BM_sigma_a_quadrature(benchmark::State& state) {
  const auto xy = StatisticSpec::from_name("xy");
  const int m = static_cast<int>(state.range(0));
  const auto theta = scalar_theta(2.0);
  const auto grid = sinkhorn_density(xy, theta, m);
  Eigen::MatrixXd sigma, a;
  for (auto _ : state) {
    sigma_a_matrices(grid, xy, theta, &sigma, &a, 2);
    benchmark::DoNotOptimize(sigma);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m) * m * m * m);
}
BENCHMARK(BM_sigma_a_quadrature)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
