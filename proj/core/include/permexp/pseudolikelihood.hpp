#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "permexp/model.hpp"

namespace permexp {

// Pseudo-likelihood objective for one observed permutation. Caches the
// diagonal table f(i/n, pi(i)/n) and accumulates pair sums over fixed-size
// tiles of rows, reduced in tile order, so evaluations are bitwise
// reproducible independent of threading at call sites.
class PlObjective {
 public:
  PlObjective(const StatisticSpec& spec, const Permutation& pi);

  void reset_permutation(const Permutation& pi);

  int dimension() const { return spec_->dimension(); }
  int n() const { return pi_.size(); }
  const Permutation& permutation() const { return pi_; }
  const StatisticSpec& spec() const { return *spec_; }

  // -log PL_n(pi, theta) = sum_{i<j} [softplus(theta.y) - theta.y].
  double neg_log(const ThetaVector& theta) const;

  // L_n(pi, theta) = sum_{i<j} y / (1 + e^{theta.y}) = -grad neg_log.
  Eigen::VectorXd gradient(const ThetaVector& theta) const;

  // H_pq = sum_{i<j} y_p y_q e^{theta.y} / (1 + e^{theta.y})^2, the unscaled
  // pair sum (the limit statements divide by n or n^2).
  Eigen::MatrixXd hessian(const ThetaVector& theta) const;

  // Single pass computing all three.
  void eval(const ThetaVector& theta, double* neg_log_out,
            Eigen::VectorXd* gradient_out, Eigen::MatrixXd* hessian_out) const;

  // Largest |y_pi(i,j)| component over all pairs.
  double max_abs_y() const;

  std::uint64_t evaluations() const { return evaluations_; }

 private:
  const StatisticSpec* spec_ = nullptr;
  Permutation pi_;
  Eigen::MatrixXd diag_;  // n x L cache of f(i/n, pi(i)/n)
  mutable std::uint64_t evaluations_ = 0;
};

double pl_neg_log(const StatisticSpec& spec, const Permutation& pi,
                  const ThetaVector& theta);
Eigen::VectorXd pl_gradient(const StatisticSpec& spec, const Permutation& pi,
                            const ThetaVector& theta);
Eigen::MatrixXd pl_hessian(const StatisticSpec& spec, const Permutation& pi,
                           const ThetaVector& theta);

struct SolveOptions {
  // Convergence is declared on the CLT-scaled gradient ||n^{-3/2} L_n||_2.
  double tol = 1e-10;
  int max_iters = 100;
};

struct SolveReport {
  ThetaVector root;
  int iterations = 0;
  double grad_norm_scaled = 0.0;  // ||n^{-3/2} L_n|| at the root
  bool converged = false;
  double hessian_cond = 0.0;      // condition estimate of H at the root
};

// Damped Newton on the convex objective, started at theta_init (default 0),
// with a bisection fallback on the monotone scalar gradient when L = 1.
// Throws Error(degenerate) when the pair differences span a proper subspace
// (flat objective, root not identified) and Error(no_bracket) when the
// scalar gradient has constant sign on [-2^30, 2^30].
SolveReport solve_ple(const StatisticSpec& spec, const Permutation& pi,
                      const ThetaVector& theta_init, const SolveOptions& opts = {});
SolveReport solve_ple(const StatisticSpec& spec, const Permutation& pi,
                      const SolveOptions& opts = {});
SolveReport solve_ple(const PlObjective& objective, const ThetaVector& theta_init,
                      const SolveOptions& opts = {});

}  // namespace permexp
