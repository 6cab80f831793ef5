#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

#include "permexp/gauss.hpp"
#include "permexp/sampler.hpp"
#include "permexp/variance.hpp"

using namespace permexp;
using namespace permexp::testing;

namespace {
ThetaVector scalar_theta(double t) {
  ThetaVector th(1);
  th[0] = t;
  return th;
}

StatisticSpec scaled_xy(double c) {
  GridTable g;
  g.m = 32;
  g.values.resize(32 * 32);
  for (int k = 0; k < 32; ++k)
    for (int l = 0; l < 32; ++l)
      g.values[k * 32 + l] = c * ((k + 0.5) / 32) * ((l + 0.5) / 32);
  return StatisticSpec({Component{std::move(g)}});
}

StatisticSpec separable_spec() {
  GridTable g;
  g.m = 16;
  g.values.resize(16 * 16);
  for (int k = 0; k < 16; ++k)
    for (int l = 0; l < 16; ++l)
      g.values[k * 16 + l] = 1.1 * ((k + 0.5) / 16) - 0.2 * ((l + 0.5) / 16);
  return StatisticSpec({Component{std::move(g)}});
}
}  // namespace

TEST_CASE("normal quantile matches reference values") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-9));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  for (double p : {0.001, 0.12, 0.5, 0.77, 0.9999})
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p))
                                    .scale(1)
                                    .epsilon(1e-9));
  // round trip through the CDF
  for (double p : {0.01, 0.3, 0.6, 0.99})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("a_hat closed form at zero and separable degeneracy") {
  const auto spec = StatisticSpec::from_name("xy,neg_abs_diff");
  Rng rng(61);
  const auto pi = uniform_permutation(9, rng);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) {
      const Eigen::VectorXd y = pair_difference(spec, pi, i, j);
      expected += 0.25 * y * y.transpose();
    }
  expected /= 81.0;
  const Eigen::MatrixXd got = a_hat(spec, pi, ThetaVector::Zero(2));
  CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-14);

  CHECK(a_hat(separable_spec(), pi, scalar_theta(0.7)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(sigma_hat(separable_spec(), pi, scalar_theta(0.7)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("grouped sigma_hat equals the naive pair-of-pairs enumeration") {
  Rng rng(67);
  const char* names[] = {"xy", "neg_abs_diff", "xy,neg_sq_diff"};
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = StatisticSpec::from_name(names[trial % 3]);
    const int n = 5 + static_cast<int>(rng.uniform_below(8));  // 5..12
    const auto pi = uniform_permutation(n, rng);
    ThetaVector theta(spec.dimension());
    for (int r = 0; r < theta.size(); ++r) theta[r] = 4.0 * rng.uniform01() - 2.0;

    const Eigen::MatrixXd grouped = sigma_hat(spec, pi, theta);
    const Eigen::MatrixXd naive = sigma_hat_naive(spec, pi, theta);
    const double scale = std::max(1e-300, naive.cwiseAbs().maxCoeff());
    CHECK((grouped - naive).cwiseAbs().maxCoeff() / scale < 1e-13);
  }
}

TEST_CASE("sigma_hat and a_hat are symmetric bitwise") {
  const auto spec = StatisticSpec::from_name("xy,neg_abs_diff");
  Rng rng(71);
  const auto pi = uniform_permutation(15, rng);
  ThetaVector theta(2);
  theta << 1.2, -0.4;
  const Eigen::MatrixXd s = sigma_hat(spec, pi, theta);
  const Eigen::MatrixXd a = a_hat(spec, pi, theta);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      CHECK(s(p, q) == s(q, p));
      CHECK(a(p, q) == a(q, p));
    }
}

TEST_CASE("plug-in matrices approach the quadrature limits on a large sample") {
  const auto xy = StatisticSpec::from_name("xy");
  const auto theta = scalar_theta(2.0);
  SamplerConfig cfg;
  Rng rng(4711);
  const auto pi = hit_and_run_sample(2.0, 1000, cfg, rng);

  const auto grid = sinkhorn_density(xy, theta, 128);
  Eigen::MatrixXd sigma_lim, a_lim;
  sigma_a_matrices(grid, xy, theta, &sigma_lim, &a_lim, 2);

  CHECK(a_hat(xy, pi, theta)(0, 0) == doctest::Approx(a_lim(0, 0)).epsilon(0.10));
  CHECK(sigma_hat(xy, pi, theta)(0, 0) == doctest::Approx(sigma_lim(0, 0)).epsilon(0.10));
}

TEST_CASE("confidence interval recomposes from its parts") {
  const auto xy = StatisticSpec::from_name("xy");
  Eigen::VectorXd d(1);
  d << 1.0;
  // An exact n = 7 observation whose plug-in variance form is positive (at
  // this size the ordered-pair Sigma_hat can be indefinite for some data).
  Permutation pi = Permutation::identity(7);
  bool found = false;
  for (const auto& images : std::vector<std::vector<int>>{{1, 2, 3, 4, 7, 5, 6},
                                                          {3, 1, 2, 5, 7, 4, 6},
                                                          {2, 4, 1, 6, 3, 7, 5},
                                                          {4, 1, 5, 2, 7, 3, 6}}) {
    pi = Permutation::from_one_indexed(images);
    try {
      const auto report = solve_ple(xy, pi);
      const auto est = sandwich_estimate(xy, pi, report.root);
      if (d.dot(est.sandwich * d) > 0.0) {
        found = true;
        break;
      }
    } catch (const Error&) {
    }
  }
  REQUIRE(found);
  const auto ci = confidence_interval(xy, pi, d, 0.05);

  const auto report = solve_ple(xy, pi);
  const auto est = sandwich_estimate(xy, pi, report.root);
  const double z = normal_quantile(0.975);
  const double half = z / std::sqrt(7.0) * std::sqrt(d.dot(est.sandwich * d));
  CHECK(std::abs(ci.lo - (report.root[0] - half)) < 1e-10);
  CHECK(std::abs(ci.hi - (report.root[0] + half)) < 1e-10);

  // alpha -> 1 collapses the interval onto the point estimate
  const auto tight = confidence_interval(xy, pi, d, 1.0 - 1e-9);
  CHECK(tight.hi - tight.lo < 1e-6);
  CHECK(tight.point == doctest::Approx(report.root[0]));
}

TEST_CASE("interval endpoints scale like 1/c when f is scaled by c") {
  const auto xy = StatisticSpec::from_name("xy");
  Rng rng(73);
  SamplerConfig cfg;
  const auto pi = hit_and_run_sample(1.0, 60, cfg, rng);
  Eigen::VectorXd d(1);
  d << 1.0;
  const auto base = confidence_interval(xy, pi, d, 0.10);
  for (double c : {0.5, 3.0}) {
    const auto scaled = confidence_interval(scaled_xy(c), pi, d, 0.10);
    CHECK(scaled.lo == doctest::Approx(base.lo / c).epsilon(0).scale(1).epsilon(1e-9));
    CHECK(scaled.hi == doctest::Approx(base.hi / c).epsilon(0).scale(1).epsilon(1e-9));
  }
}

TEST_CASE("mini coverage run at moderate n") {
  const auto xy = StatisticSpec::from_name("xy");
  Eigen::VectorXd d(1);
  d << 1.0;
  SamplerConfig cfg;
  int covered = 0;
  const int reps = 60;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_stream_seed(31337, rep));
    const auto pi = hit_and_run_sample(2.0, 300, cfg, rng);
    const auto ci = confidence_interval(xy, pi, d, 0.05);
    if (ci.lo <= 2.0 && 2.0 <= ci.hi) ++covered;
  }
  CHECK(covered >= 47);  // binomial(60, .95) lower tail, wide margin
}

TEST_CASE("sandwich refuses a singular a_hat") {
  // Two exactly dependent components make A_hat singular.
  GridTable doubled;
  doubled.m = 32;
  doubled.values.resize(32 * 32);
  for (int k = 0; k < 32; ++k)
    for (int l = 0; l < 32; ++l)
      doubled.values[k * 32 + l] = 2.0 * ((k + 0.5) / 32) * ((l + 0.5) / 32);
  const StatisticSpec dep({Builtin::xy, std::move(doubled)});
  Rng rng(79);
  const auto pi = uniform_permutation(10, rng);
  try {
    sandwich_estimate(dep, pi, ThetaVector::Zero(2));
    FAIL("expected singular_a_hat");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_a_hat);
  }
}
