#pragma once

#include <Eigen/Dense>

#include "permexp/model.hpp"

namespace permexp {

// grad Z_n(0) = E_0 T(pi), the exact O(n^2 L) double sum
// (E_0 T_r = sum_i (1/n) sum_j f_r(i/n, j/n)).
Eigen::VectorXd grad_Z0(const StatisticSpec& spec, int n);

// Exact Var_0(T) via the combinatorial-CLT identity
// Var_0(d'T) = (1/(n-1)) sum_{i,j} (d'c_n(i,j))^2 with c_n the doubly
// centered node table of f.
Eigen::MatrixXd hoeffding_variance(const StatisticSpec& spec, int n);

struct OriginCalibration {
  Eigen::VectorXd grad_z0;   // exact E_0 T
  Eigen::MatrixXd gamma_n;   // hoeffding_variance / n
  double stat_scale = 1.0;   // sup |f| over the node grid, for the guard
  int n = 0;
};

OriginCalibration make_origin_calibration(const StatisticSpec& spec, int n);

// One-step linearization of the likelihood equation at the origin:
// theta ~ Gamma_n^{-1} (T(pi) - grad Z_n(0)) / n. A surrogate for the MLE
// that is only meaningful in a sqrt(n)-neighborhood of theta = 0.
Eigen::VectorXd approx_mle_origin(const StatisticSpec& spec, const Permutation& pi);
Eigen::VectorXd approx_mle_origin(const OriginCalibration& calib, const StatisticSpec& spec,
                                  const Permutation& pi);

// The literal scalar variant with gamma = Int f^2 dx dy (no centering of the
// table); kept for comparison behind the CLI --paper-gamma flag. L = 1 only.
double approx_mle_origin_raw_gamma(const StatisticSpec& spec, const Permutation& pi);

}  // namespace permexp
