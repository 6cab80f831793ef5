#pragma once

#include <Eigen/Dense>
#include <vector>

#include "permexp/statistic.hpp"

namespace permexp {

// Discretized limiting coupling: density values rho(x_k, y_l) at midpoint
// nodes, with uniform marginals (row and column means 1) and
// rho = exp(theta.f + a(x) + b(y)). Potentials are gauge-fixed so that
// sum(a) = sum(b).
struct CouplingGrid {
  int m = 0;
  ThetaVector theta;
  std::vector<double> density;  // row-major in x, density[k*m + l]
  std::vector<double> a;        // length m
  std::vector<double> b;        // length m
  double marginal_error = 0.0;
  int iterations = 0;
  std::vector<double> error_trace;  // recorded every 100 iterations

  double rho(int k, int l) const { return density[static_cast<std::size_t>(k) * m + l]; }
  double node(int k) const { return (k + 0.5) / m; }
};

struct SinkhornOptions {
  double tol = 1e-10;   // max L-inf deviation of row/col means from 1
  long max_iters = 100000;
};

// Alternating row/column normalization of exp(theta.f) in log domain until
// both discrete marginals are uniform. Throws Error(max_iters_exceeded) with
// the last marginal error in the message if the tolerance is not reached.
CouplingGrid sinkhorn_density(const StatisticSpec& spec, const ThetaVector& theta,
                              int m, const SinkhornOptions& opts = {});

// z(theta) = mu_theta(f), by midpoint quadrature of f against the density.
Eigen::VectorXd limiting_z_vector(const CouplingGrid& grid, const StatisticSpec& spec);

// Z(theta) = theta.z(theta) - D(mu_theta || u)  (the limit of (Z_n - log n!)/n).
double limiting_log_partition(const CouplingGrid& grid, const StatisticSpec& spec,
                              const ThetaVector& theta);

// Asymptotic matrices of the PLE CLT:
//   Sigma_pq = Int g_p(z1,z2) g_q(z1,z3) w(z1,z2) w(z1,z3) dmu^3,
//     w = 1/(1+e^{theta.g}), computed through the conditional integral
//     s_p(z1) = Int g_p(z1,z2) w(z1,z2) dmu(z2) in O(m^4 L);
//   A_pq = (1/2) Int g_p g_q e^{theta.g}/(1+e^{theta.g})^2 dmu^2.
Eigen::MatrixXd sigma_matrix(const CouplingGrid& grid, const StatisticSpec& spec,
                             const ThetaVector& theta, int threads = 0);
Eigen::MatrixXd a_matrix(const CouplingGrid& grid, const StatisticSpec& spec,
                         const ThetaVector& theta, int threads = 0);

// One shared m^4 sweep for both matrices.
void sigma_a_matrices(const CouplingGrid& grid, const StatisticSpec& spec,
                      const ThetaVector& theta, Eigen::MatrixXd* sigma_out,
                      Eigen::MatrixXd* a_out, int threads = 0);

// Gamma_pq = Int f_p f_q dx dy; requires a doubly centered spec, else
// throws Error(not_centered).
Eigen::MatrixXd gamma_matrix(const StatisticSpec& spec, int m);

// A(theta)^{-1} Sigma(theta) A(theta)^{-1}; equals Gamma^{-1} at theta = 0
// for centered specs.
Eigen::MatrixXd asymptotic_ple_cov(const CouplingGrid& grid, const StatisticSpec& spec,
                                   const ThetaVector& theta, int threads = 0);

}  // namespace permexp
