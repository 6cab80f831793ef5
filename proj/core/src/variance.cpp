#include "permexp/variance.hpp"

#include <cmath>
#include <vector>

#include "permexp/gauss.hpp"
#include "permexp/logistic.hpp"

namespace permexp {

Eigen::MatrixXd a_hat(const StatisticSpec& spec, const Permutation& pi,
                      const ThetaVector& theta) {
  const double n = pi.size();
  return pl_hessian(spec, pi, theta) / (n * n);
}

Eigen::MatrixXd sigma_hat(const StatisticSpec& spec, const Permutation& pi,
                          const ThetaVector& theta) {
  if (theta.size() != spec.dimension())
    throw Error(ErrorCode::dimension_mismatch, "theta dimension != statistic dimension");
  const int n = pi.size();
  const int L = spec.dimension();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(L, L);
  Eigen::VectorXd s(L), t(L);
  Eigen::MatrixXd c(L, L);
  std::vector<double> y(L);
  for (int a = 0; a < n; ++a) {
    s.setZero();
    c.setZero();
    const double xa = pi.x_node(a), ya = pi.y_node(a);
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double xb = pi.x_node(b), yb = pi.y_node(b);
      double dot = 0.0;
      for (int r = 0; r < L; ++r) {
        y[r] = g_kernel_component(spec, r, xa, ya, xb, yb);
        dot += theta[r] * y[r];
      }
      const double w = inv_one_plus_exp(dot);
      for (int r = 0; r < L; ++r) t[r] = w * y[r];
      s += t;
      for (int p = 0; p < L; ++p)
        for (int q = p; q < L; ++q) c(p, q) += t[p] * t[q];
    }
    // sum over ordered legs b != c of t(a,b) t(a,c)': the two pairs {a,b},
    // {a,c} share exactly the position a.
    for (int p = 0; p < L; ++p)
      for (int q = p; q < L; ++q) sigma(p, q) += s[p] * s[q] - c(p, q);
  }
  const double n3 = static_cast<double>(n) * n * n;
  for (int p = 0; p < L; ++p)
    for (int q = p; q < L; ++q) {
      sigma(p, q) /= n3;
      sigma(q, p) = sigma(p, q);
    }
  return sigma;
}

SandwichEstimate sandwich_estimate(const StatisticSpec& spec, const Permutation& pi,
                                   const ThetaVector& theta) {
  SandwichEstimate est;
  est.n = pi.size();
  est.sigma_hat = sigma_hat(spec, pi, theta);
  est.a_hat = a_hat(spec, pi, theta);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.a_hat);
  const double lambda_max = es.eigenvalues().cwiseAbs().maxCoeff();
  const double floor = 1e-12 * lambda_max;
  if (lambda_max <= 0.0 || es.eigenvalues().minCoeff() <= floor)
    throw Error(ErrorCode::singular_a_hat,
                "A_hat condition number exceeds 1e12; sandwich not invertible");
  const Eigen::MatrixXd a_inv = es.eigenvectors() *
                                es.eigenvalues().cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
  est.sandwich = a_inv * est.sigma_hat * a_inv;
  // Symmetrize away the rounding skew of the triple product.
  est.sandwich = ((est.sandwich + est.sandwich.transpose()) / 2.0).eval();
  return est;
}

ConfidenceInterval confidence_interval(const StatisticSpec& spec, const Permutation& pi,
                                       const Eigen::VectorXd& d, double alpha,
                                       const SolveOptions& opts) {
  if (d.size() != spec.dimension())
    throw Error(ErrorCode::dimension_mismatch, "d dimension != statistic dimension");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::invalid_argument, "alpha must be in (0,1)");

  ConfidenceInterval ci;
  ci.solve = solve_ple(spec, pi, opts);
  ci.sandwich = sandwich_estimate(spec, pi, ci.solve.root);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double quad = std::max(0.0, d.dot(ci.sandwich.sandwich * d));
  ci.point = d.dot(ci.solve.root);
  ci.half_width = z / std::sqrt(static_cast<double>(pi.size())) * std::sqrt(quad);
  ci.lo = ci.point - ci.half_width;
  ci.hi = ci.point + ci.half_width;
  return ci;
}

}  // namespace permexp
