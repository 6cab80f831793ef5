#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

#include "permexp/gauss.hpp"
#include "permexp/mle_origin.hpp"
#include "permexp/sampler.hpp"

using namespace permexp;
using namespace permexp::testing;

namespace {
ThetaVector scalar_theta(double t) {
  ThetaVector th(1);
  th[0] = t;
  return th;
}

// (x - c)(y - c) with c = (n+1)/(2n): doubly centered over the node grid
// {1/n,...,1}, and bilinear so the tabulation is exact.
StatisticSpec node_centered_product(int n) {
  const double c = (n + 1.0) / (2.0 * n);
  GridTable g;
  g.m = 32;
  g.values.resize(32 * 32);
  for (int k = 0; k < 32; ++k)
    for (int l = 0; l < 32; ++l)
      g.values[k * 32 + l] = ((k + 0.5) / 32 - c) * ((l + 0.5) / 32 - c);
  return StatisticSpec({Component{std::move(g)}});
}
}  // namespace

TEST_CASE("grad_Z0 closed form and enumeration oracle") {
  const auto xy = StatisticSpec::from_name("xy");
  // (n+1)^2 / (4n) at n = 10
  CHECK(grad_Z0(xy, 10)[0] == doctest::Approx(3.025).epsilon(1e-13));

  // node-grid centered statistic: the double sum collapses to zero
  CHECK(std::abs(grad_Z0(node_centered_product(5), 5)[0]) < 1e-12);

  const auto nad = StatisticSpec::from_name("neg_abs_diff");
  const ExactModel model(nad, 6);
  CHECK(grad_Z0(nad, 6)[0] ==
        doctest::Approx(model.mean(scalar_theta(0.0))[0]).epsilon(1e-12));
}

TEST_CASE("hoeffding variance equals brute force and the 1/144 law") {
  const auto xy = StatisticSpec::from_name("xy");
  CHECK(hoeffding_variance(xy, 5)(0, 0) ==
        doctest::Approx(ExactModel(xy, 5).variance(scalar_theta(0.0))(0, 0))
            .epsilon(1e-12));

  const auto spec2 = StatisticSpec::from_name("xy,neg_abs_diff");
  const Eigen::MatrixXd v2 = hoeffding_variance(spec2, 5);
  const Eigen::MatrixXd b2 = ExactModel(spec2, 5).variance(ThetaVector::Zero(2));
  CHECK((v2 - b2).cwiseAbs().maxCoeff() < 1e-12);

  // n = 2: the two-point distribution directly
  CHECK(hoeffding_variance(xy, 2)(0, 0) ==
        doctest::Approx(ExactModel(xy, 2).variance(scalar_theta(0.0))(0, 0))
            .epsilon(1e-13));

  // centered xy: (1/n) Var_0(T) -> 1/144, within 2% at n = 200
  const auto centered = center_components(xy, 512);
  CHECK(hoeffding_variance(centered, 200)(0, 0) / 200.0 ==
        doctest::Approx(1.0 / 144.0).epsilon(0.02));
}

TEST_CASE("approx MLE at the origin: exact zero and oracle band") {
  const int n = 5;
  const auto spec = node_centered_product(n);
  // T(pi) = 0 = grad_Z0 for this permutation: the products cancel in pairs.
  const auto pi = Permutation::from_one_indexed({2, 5, 3, 1, 4});
  CHECK(std::abs(sufficient_statistic(spec, pi)[0]) < 1e-12);
  CHECK(std::abs(approx_mle_origin(spec, pi)[0]) < 1e-10);

  // near the origin the surrogate tracks the exact MLE loosely (n <= 7)
  const auto xy = StatisticSpec::from_name("xy");
  const ExactModel model(xy, 7);
  SamplerConfig cfg;
  cfg.sweeps = 50;
  int checked = 0;
  for (int rep = 0; rep < 30; ++rep) {
    Rng rng(derive_stream_seed(8080, rep));
    const auto sample = gibbs_sample(xy, scalar_theta(0.3), 7, cfg, rng);
    double exact;
    try {
      exact = model.mle(sample)[0];
    } catch (const Error&) {
      continue;  // hull boundary draw
    }
    const double approx = approx_mle_origin(xy, sample)[0];
    CHECK(std::abs(approx - exact) <= 5.0 * std::abs(exact) + 0.5);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("approx MLE is the one-step Newton from zero on the exact objective") {
  // n gamma_n = Var_0(T), so the surrogate equals Var_0(T)^{-1}(T - E_0 T),
  // the first Newton iterate of the exact likelihood equation.
  const auto xy = StatisticSpec::from_name("xy");
  const int n = 6;
  const ExactModel model(xy, n);
  Rng rng(83);
  const auto pi = uniform_permutation(n, rng);
  const double t = sufficient_statistic(xy, pi)[0];
  const double newton1 = (t - model.mean(scalar_theta(0.0))[0]) /
                         model.variance(scalar_theta(0.0))(0, 0);
  CHECK(approx_mle_origin(xy, pi)[0] == doctest::Approx(newton1).epsilon(1e-10));
}

TEST_CASE("standardized statistic is normal under uniform sampling") {
  const auto xy = StatisticSpec::from_name("xy");
  const int n = 1000;
  const auto calib = make_origin_calibration(xy, n);
  const double mu = calib.grad_z0[0];
  const double sd = std::sqrt(calib.gamma_n(0, 0) * n);
  Rng rng(1871);
  std::vector<double> z;
  for (int rep = 0; rep < 5000; ++rep) {
    const auto pi = uniform_permutation(n, rng);
    z.push_back((sufficient_statistic(xy, pi)[0] - mu) / sd);
  }
  CHECK(ks_statistic_normal(z, 0.0, 1.0) < 0.035);
}

TEST_CASE("raw-gamma variant reproduces the literal 1/9 scaling") {
  const auto xy = StatisticSpec::from_name("xy");
  Rng rng(89);
  const auto pi = uniform_permutation(50, rng);
  const double t = sufficient_statistic(xy, pi)[0];
  const double z0 = grad_Z0(xy, 50)[0];
  CHECK(approx_mle_origin_raw_gamma(xy, pi) ==
        doctest::Approx((t - z0) / (50.0 / 9.0)).epsilon(1e-4));
}

TEST_CASE("degenerate calibration is refused") {
  // constant-ish separable statistic: zero Hoeffding variance
  GridTable g;
  g.m = 16;
  g.values.assign(16 * 16, 0.42);
  const StatisticSpec flat({Component{std::move(g)}});
  Rng rng(97);
  const auto pi = uniform_permutation(8, rng);
  CHECK_THROWS_AS(approx_mle_origin(flat, pi), Error);
}
