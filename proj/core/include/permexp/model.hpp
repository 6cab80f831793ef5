#pragma once

#include <Eigen/Dense>
#include <array>

#include "permexp/permutation.hpp"
#include "permexp/statistic.hpp"

namespace permexp {

// T(pi) = sum_i f(i/n, pi(i)/n).
Eigen::VectorXd sufficient_statistic(const StatisticSpec& spec, const Permutation& pi);

// y_pi(i,j) = f(i/n,pi(i)/n) + f(j/n,pi(j)/n) - f(i/n,pi(j)/n) - f(j/n,pi(i)/n)
// for 0-indexed positions i != j. Symmetric in (i,j); negated when pi is
// composed with the transposition of i and j.
Eigen::VectorXd pair_difference(const StatisticSpec& spec, const Permutation& pi,
                                int i, int j);

// g((x1,y1),(x2,y2)) = f(x1,y1) + f(x2,y2) - f(x1,y2) - f(x2,y1).
Eigen::VectorXd g_kernel(const StatisticSpec& spec, double x1, double y1,
                         double x2, double y2);

// (f(x1,y1) - f(x1,y2)) + (f(x2,y2) - f(x2,y1)). Grouping by x keeps the
// symmetry in (i,j) and the antisymmetry under swapping y1 and y2 exact in
// floating point, which several invariants assert bitwise.
inline double g_kernel_component(const StatisticSpec& spec, int r, double x1, double y1,
                                 double x2, double y2) {
  return (spec.eval(r, x1, y1) - spec.eval(r, x1, y2)) +
         (spec.eval(r, x2, y2) - spec.eval(r, x2, y1));
}

// In-place variant for hot loops: writes the L components of y_pi(i,j).
inline void pair_difference_into(const StatisticSpec& spec, const Permutation& pi,
                                 int i, int j, double* out) {
  const double xi = pi.x_node(i), yi = pi.y_node(i);
  const double xj = pi.x_node(j), yj = pi.y_node(j);
  for (int r = 0; r < spec.dimension(); ++r)
    out[r] = g_kernel_component(spec, r, xi, yi, xj, yj);
}

}  // namespace permexp
