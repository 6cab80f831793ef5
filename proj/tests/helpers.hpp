#pragma once

// Test-only oracles kept independent of the implementation paths they check:
// naive pair-of-pairs sums, naive triple quadratures, finite differences,
// and small statistical utilities.

#include <cmath>
#include <functional>
#include <vector>

#include "permexp/limiting.hpp"
#include "permexp/logistic.hpp"
#include "permexp/model.hpp"
#include "permexp/oracle.hpp"
#include "permexp/rng.hpp"

namespace permexp::testing {

// Naive Sigma_hat: enumerate ordered pairs of distinct index pairs sharing
// exactly one position, O(n^3) per entry loop. The reference for the
// regrouped implementation.
inline Eigen::MatrixXd sigma_hat_naive(const StatisticSpec& spec, const Permutation& pi,
                                       const ThetaVector& theta) {
  const int n = pi.size();
  const int L = spec.dimension();
  auto t_of = [&](int a, int b) {
    const Eigen::VectorXd y = pair_difference(spec, pi, a, b);
    return (inv_one_plus_exp(theta.dot(y)) * y).eval();
  };
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(L, L);
  // Ordered pairs of edges: the (i<j) x (k<l) product visits each unordered
  // edge pair in both orders, which is exactly the Lemma's double sum.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          // shared-position count of {i,j} vs {k,l}
          const int shared = (i == k) + (i == l) + (j == k) + (j == l);
          if (shared != 1) continue;
          const Eigen::VectorXd t1 = t_of(i, j);
          const Eigen::VectorXd t2 = t_of(k, l);
          sigma += t1 * t2.transpose();
        }
  return sigma / (static_cast<double>(n) * n * n);
}

// Direct triple/double quadrature of Sigma(theta) and A(theta) over the
// coupling grid, O(m^6); only usable at tiny m.
inline void sigma_a_naive_quadrature(const CouplingGrid& grid, const StatisticSpec& spec,
                                     const ThetaVector& theta, Eigen::MatrixXd* sigma_out,
                                     Eigen::MatrixXd* a_out) {
  const int m = grid.m;
  const int L = spec.dimension();
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  auto point = [&](std::size_t z) {
    return std::pair<double, double>{grid.node(static_cast<int>(z) / m),
                                     grid.node(static_cast<int>(z) % m)};
  };
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(L, L);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(L, L);
  for (std::size_t z1 = 0; z1 < mm; ++z1) {
    const auto [x1, y1] = point(z1);
    for (std::size_t z2 = 0; z2 < mm; ++z2) {
      const auto [x2, y2] = point(z2);
      const Eigen::VectorXd g12 = g_kernel(spec, x1, y1, x2, y2);
      const double w12 = inv_one_plus_exp(theta.dot(g12));
      a += grid.density[z1] * grid.density[z2] * logistic_weight(theta.dot(g12)) *
           (g12 * g12.transpose());
      for (std::size_t z3 = 0; z3 < mm; ++z3) {
        const auto [x3, y3] = point(z3);
        const Eigen::VectorXd g13 = g_kernel(spec, x1, y1, x3, y3);
        const double w13 = inv_one_plus_exp(theta.dot(g13));
        sigma += grid.density[z1] * grid.density[z2] * grid.density[z3] * w12 * w13 *
                 (g12 * g13.transpose());
      }
    }
  }
  const double mm_d = static_cast<double>(mm);
  if (sigma_out) *sigma_out = sigma / (mm_d * mm_d * mm_d);
  if (a_out) *a_out = a / (2.0 * mm_d * mm_d);
}

// Central finite difference of a scalar function of theta.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::VectorXd gradient_fd(const std::function<double(const ThetaVector&)>& f,
                                   const ThetaVector& theta, double h) {
  Eigen::VectorXd g(theta.size());
  for (int r = 0; r < theta.size(); ++r) {
    ThetaVector up = theta, dn = theta;
    up[r] += h;
    dn[r] -= h;
    g[r] = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d / 2.0;
}

// Empirical distribution over lexicographic ranks from repeated sampling.
template <class SampleFn>
std::vector<double> empirical_rank_distribution(int n, long reps, SampleFn&& draw) {
  std::vector<double> freq(factorial(n), 0.0);
  for (long rep = 0; rep < reps; ++rep) freq[permutation_rank(draw(rep))] += 1.0;
  for (auto& f : freq) f /= static_cast<double>(reps);
  return freq;
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sd_of(const std::vector<double>& xs) {
  const double mu = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace permexp::testing
