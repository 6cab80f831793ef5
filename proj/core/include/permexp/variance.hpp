#pragma once

#include <Eigen/Dense>

#include "permexp/pseudolikelihood.hpp"

namespace permexp {

// Plug-in matrices of the sandwich covariance and the derived confidence
// interval for d'theta.

// A_hat_pq = n^{-2} sum_{i<j} y_p y_q e^{theta.y} / (1+e^{theta.y})^2.
Eigen::MatrixXd a_hat(const StatisticSpec& spec, const Permutation& pi,
                      const ThetaVector& theta);

// Sigma_hat_pq = n^{-3} * sum over ordered pairs of distinct index pairs
// sharing exactly one position, of t_p(e1) t_q(e2) with
// t(a,b) = y(a,b) / (1 + e^{theta.y(a,b)}). Computed by the O(n^2 L^2)
// regrouping per shared position a:
//   sum_a [ S_a S_a' - sum_{b != a} t(a,b) t(a,b)' ],  S_a = sum_{b != a} t(a,b).
// The counting convention (each unordered configuration twice, once per
// ordering) is the one under which A^{-1} Sigma A^{-1} converges to the
// sandwich limit; tests pin it against the naive triple loop.
Eigen::MatrixXd sigma_hat(const StatisticSpec& spec, const Permutation& pi,
                          const ThetaVector& theta);

struct SandwichEstimate {
  Eigen::MatrixXd sigma_hat;
  Eigen::MatrixXd a_hat;
  Eigen::MatrixXd sandwich;  // A^{-1} Sigma A^{-1}
  int n = 0;
};

// Inverts A_hat by symmetric eigendecomposition; refuses with
// Error(singular_a_hat) when the condition number exceeds 1e12 (eigenvalue
// floor 1e-12 * ||A_hat||).
SandwichEstimate sandwich_estimate(const StatisticSpec& spec, const Permutation& pi,
                                   const ThetaVector& theta);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double point = 0.0;       // d' theta_hat
  double half_width = 0.0;  // z_{alpha/2} n^{-1/2} sqrt(d' sandwich d)
  SolveReport solve;
  SandwichEstimate sandwich;
};

// Solves for the PLE, evaluates the sandwich there, and returns
// d'theta_hat +/- z_{alpha/2} n^{-1/2} sqrt(d' [A^-1 Sigma A^-1] d).
ConfidenceInterval confidence_interval(const StatisticSpec& spec, const Permutation& pi,
                                       const Eigen::VectorXd& d, double alpha,
                                       const SolveOptions& opts = {});

}  // namespace permexp
