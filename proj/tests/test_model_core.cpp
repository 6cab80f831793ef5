#include "doctest.h"
#include "helpers.hpp"

#include <numeric>
#include <sstream>

#include "permexp/model.hpp"
#include "permexp/rng.hpp"

using namespace permexp;

namespace {
Permutation random_perm(int n, Rng& rng) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(img[i], img[rng.uniform_below(static_cast<std::uint64_t>(i) + 1)]);
  return Permutation(std::move(img));
}
}  // namespace

TEST_CASE("permutation validation and indexing") {
  CHECK_THROWS_AS(Permutation({0, 0, 2}), Error);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), Error);
  CHECK_THROWS_AS(Permutation(std::vector<int>{}), Error);

  const auto pi = Permutation::from_one_indexed({3, 1, 2});
  CHECK(pi.image1(1) == 3);
  CHECK(pi.image(0) == 2);
  CHECK(pi.one_indexed() == std::vector<int>{3, 1, 2});

  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_perm(8, rng);
    auto sorted = p.one_indexed();
    std::sort(sorted.begin(), sorted.end());
    for (int v = 1; v <= 8; ++v) CHECK(sorted[v - 1] == v);
  }
}

TEST_CASE("sufficient statistic on known instances") {
  const auto xy = StatisticSpec::from_name("xy");

  CHECK(sufficient_statistic(xy, Permutation::from_one_indexed({2, 1}))[0] ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sufficient_statistic(xy, Permutation::identity(4))[0] ==
        doctest::Approx(1.875).epsilon(1e-14));

  // -|x-y| at n=3, pi=(3,1,2): sum |i - pi(i)| = 2+1+1, so T = -4/3 exactly
  // as a rational in thirds.
  const auto nad = StatisticSpec::from_name("neg_abs_diff");
  const auto pi = Permutation::from_one_indexed({3, 1, 2});
  int abs_sum = 0;
  for (int i = 1; i <= 3; ++i) abs_sum += std::abs(i - pi.image1(i));
  CHECK(sufficient_statistic(nad, pi)[0] ==
        doctest::Approx(-abs_sum / 3.0).epsilon(1e-15));

  const auto spec2 = StatisticSpec::from_name("xy,neg_abs_diff");
  const auto t2 = sufficient_statistic(spec2, pi);
  CHECK(t2.size() == 2);
  CHECK(t2[1] == doctest::Approx(-4.0 / 3.0));
}

TEST_CASE("pair difference examples and error") {
  const auto xy = StatisticSpec::from_name("xy");
  const auto id10 = Permutation::identity(10);
  // closed form (i-j)(pi(i)-pi(j))/n^2 for f = xy
  CHECK(pair_difference(xy, id10, 0, 1)[0] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK_THROWS_AS(pair_difference(xy, id10, 3, 3), Error);

  // -(x-y)^2 at n=5, pi=(2,4,1,5,3), positions (2,5) 1-indexed. Four-term
  // evaluation in exact 25ths: -(2-4)^2 - (5-3)^2 + (2-3)^2 + (5-4)^2 = -6.
  const auto nsd = StatisticSpec::from_name("neg_sq_diff");
  const auto pi = Permutation::from_one_indexed({2, 4, 1, 5, 3});
  const int num = -(2 - 4) * (2 - 4) - (5 - 3) * (5 - 3) + (2 - 3) * (2 - 3) +
                  (5 - 4) * (5 - 4);
  CHECK(pair_difference(nsd, pi, 1, 4)[0] ==
        doctest::Approx(num / 25.0).epsilon(1e-13));
}

TEST_CASE("pair difference symmetry and transposition antisymmetry are exact") {
  Rng rng(11);
  for (const char* name : {"xy", "neg_abs_diff", "neg_sq_diff", "xy,neg_sq_diff"}) {
    const auto spec = StatisticSpec::from_name(name);
    for (int trial = 0; trial < 20; ++trial) {
      const auto pi = random_perm(9, rng);
      const int i = static_cast<int>(rng.uniform_below(9));
      int j = static_cast<int>(rng.uniform_below(8));
      if (j >= i) ++j;
      const Eigen::VectorXd yij = pair_difference(spec, pi, i, j);
      const Eigen::VectorXd yji = pair_difference(spec, pi, j, i);
      for (int r = 0; r < spec.dimension(); ++r) CHECK(yij[r] == yji[r]);

      auto img = pi.images();
      std::swap(img[i], img[j]);
      const Eigen::VectorXd y_swapped =
          pair_difference(spec, Permutation(img), i, j);
      for (int r = 0; r < spec.dimension(); ++r) CHECK(y_swapped[r] == -yij[r]);
    }
  }
}

TEST_CASE("g kernel properties") {
  const auto xy = StatisticSpec::from_name("xy");
  CHECK(g_kernel(xy, 0.3, 0.7, 0.3, 0.7)[0] == 0.0);
  CHECK(g_kernel(xy, 1.0, 1.0, 0.0, 0.0)[0] == doctest::Approx(1.0));

  // consistency with pair_difference at grid points
  const auto spec2 = StatisticSpec::from_name("xy,neg_abs_diff");
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 10;
    const auto pi = random_perm(n, rng);
    const int i = static_cast<int>(rng.uniform_below(n));
    int j = static_cast<int>(rng.uniform_below(n - 1));
    if (j >= i) ++j;
    const Eigen::VectorXd y = pair_difference(spec2, pi, i, j);
    const Eigen::VectorXd g = g_kernel(spec2, pi.x_node(i), pi.y_node(i),
                                       pi.x_node(j), pi.y_node(j));
    for (int r = 0; r < 2; ++r) CHECK(y[r] == g[r]);
  }
}

TEST_CASE("center_components: xy becomes (x-1/2)(y-1/2)") {
  const auto xy = StatisticSpec::from_name("xy");
  const auto centered = center_components(xy, 512);
  CHECK(centered.centered());
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform01();
    const double y = rng.uniform01();
    CHECK(centered.eval(0, x, y) ==
          doctest::Approx((x - 0.5) * (y - 0.5)).epsilon(0).scale(1).epsilon(1e-9));
  }
}

TEST_CASE("center_components idempotence and marginal averages") {
  const auto nad = StatisticSpec::from_name("neg_abs_diff");
  const auto c1 = center_components(nad, 256);
  CHECK(max_marginal_average(c1, 256) < 1e-9);

  const auto c2 = center_components(c1, 256);
  for (int k = 0; k < 256; ++k) {
    const double x = (k + 0.5) / 256;
    CHECK(std::abs(c2.eval(0, x, 1.0 - x) - c1.eval(0, x, 1.0 - x)) < 1e-12);
  }
}

TEST_CASE("centering leaves pair differences and the model unchanged") {
  const auto raw = StatisticSpec::from_name("xy");
  const auto centered = center_components(raw, 512);
  Rng rng(13);
  const int n = 12;

  // y invariance
  for (int trial = 0; trial < 30; ++trial) {
    const auto pi = random_perm(n, rng);
    const int i = static_cast<int>(rng.uniform_below(n));
    int j = static_cast<int>(rng.uniform_below(n - 1));
    if (j >= i) ++j;
    CHECK(std::abs(pair_difference(raw, pi, i, j)[0] -
                   pair_difference(centered, pi, i, j)[0]) < 1e-12);
  }

  // T changes only by a pi-independent constant
  double shift = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pi = random_perm(n, rng);
    const double delta = sufficient_statistic(centered, pi)[0] -
                         sufficient_statistic(raw, pi)[0];
    if (trial == 0)
      shift = delta;
    else
      CHECK(delta == doctest::Approx(shift).epsilon(0).scale(1).epsilon(1e-9));
  }
}

TEST_CASE("linear independence gram eigenvalue") {
  const auto xy = StatisticSpec::from_name("xy");
  // gamma = Int x^2 y^2 = 1/9
  CHECK(check_linear_independence(xy, 512) == doctest::Approx(1.0 / 9.0).epsilon(1e-5));

  // exact dependence: f2 = 2 f1 tabulated
  GridTable doubled;
  doubled.m = 64;
  doubled.values.resize(64 * 64);
  for (int k = 0; k < 64; ++k)
    for (int l = 0; l < 64; ++l)
      doubled.values[k * 64 + l] = 2.0 * ((k + 0.5) / 64) * ((l + 0.5) / 64);
  StatisticSpec dep({Builtin::xy, std::move(doubled)});
  CHECK(check_linear_independence(dep, 256) <= kLinearIndependenceTol);

  // centered pair is independent; 512-point value agrees with the dense
  // 2048-point quadrature
  const auto pair = center_components(StatisticSpec::from_name("xy,neg_abs_diff"), 512);
  const double lam512 = check_linear_independence(pair, 512);
  const double lam2048 = check_linear_independence(pair, 2048);
  CHECK(lam512 > 1e-4);
  CHECK(lam512 == doctest::Approx(lam2048).epsilon(1e-3));
}

TEST_CASE("permutation file format round trip") {
  const auto pi = Permutation::from_one_indexed({4, 2, 5, 1, 3});
  std::ostringstream out;
  write_permutation_line(out, pi);
  CHECK(out.str() == "4 2 5 1 3\n");
  CHECK(parse_permutation_line(out.str()) == pi);

  std::istringstream in("1 2 3\n3 1 2\n");
  const auto pis = read_permutations(in);
  REQUIRE(pis.size() == 2);
  CHECK(pis[1] == Permutation::from_one_indexed({3, 1, 2}));
}

TEST_CASE("tabulated statistic format round trip") {
  const auto spec = center_components(StatisticSpec::from_name("xy,neg_sq_diff"), 32);
  std::ostringstream out;
  write_tabulated(out, spec);
  std::istringstream in(out.str());
  const auto back = read_tabulated(in);
  REQUIRE(back.dimension() == 2);
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = rng.uniform01();
    const double y = rng.uniform01();
    for (int r = 0; r < 2; ++r)
      CHECK(back.eval(r, x, y) == doctest::Approx(spec.eval(r, x, y)).epsilon(1e-14));
  }
}

TEST_CASE("statistic spec rejects malformed input") {
  CHECK_THROWS_AS(StatisticSpec::from_name("nope"), Error);
  std::istringstream bad("2 1\n0.0 1.0\n");
  CHECK_THROWS_AS(read_tabulated(bad), Error);
}
