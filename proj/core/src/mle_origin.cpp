#include "permexp/mle_origin.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace permexp {

Eigen::VectorXd grad_Z0(const StatisticSpec& spec, int n) {
  const int L = spec.dimension();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L);
  for (int i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    for (int j = 1; j <= n; ++j) {
      const double y = static_cast<double>(j) / n;
      for (int r = 0; r < L; ++r) out[r] += spec.eval(r, x, y);
    }
  }
  return out / n;
}

Eigen::MatrixXd hoeffding_variance(const StatisticSpec& spec, int n) {
  const int L = spec.dimension();
  // Doubly centered node table c_n(i,j), per component.
  std::vector<Eigen::MatrixXd> c(L, Eigen::MatrixXd(n, n));
  for (int r = 0; r < L; ++r) {
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1) / n;
      for (int j = 0; j < n; ++j)
        c[r](i, j) = spec.eval(r, x, static_cast<double>(j + 1) / n);
    }
    const Eigen::VectorXd row_mean = c[r].rowwise().mean();
    const Eigen::RowVectorXd col_mean = c[r].colwise().mean();
    const double grand = c[r].mean();
    c[r].colwise() -= row_mean;
    c[r].rowwise() -= col_mean;
    c[r].array() += grand;
  }
  Eigen::MatrixXd var(L, L);
  for (int p = 0; p < L; ++p)
    for (int q = p; q < L; ++q) {
      var(p, q) = c[p].cwiseProduct(c[q]).sum() / (n - 1);
      var(q, p) = var(p, q);
    }
  return var;
}

OriginCalibration make_origin_calibration(const StatisticSpec& spec, int n) {
  OriginCalibration calib;
  calib.n = n;
  calib.grad_z0 = grad_Z0(spec, n);
  calib.gamma_n = hoeffding_variance(spec, n) / n;
  double sup = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int r = 0; r < spec.dimension(); ++r)
        sup = std::max(sup, std::abs(spec.eval(r, static_cast<double>(i) / n,
                                               static_cast<double>(j) / n)));
  calib.stat_scale = sup;
  return calib;
}

Eigen::VectorXd approx_mle_origin(const OriginCalibration& calib,
                                  const StatisticSpec& spec, const Permutation& pi) {
  if (pi.size() != calib.n)
    throw Error(ErrorCode::invalid_argument, "calibration n != permutation n");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(calib.gamma_n);
  const double lambda_max = es.eigenvalues().cwiseAbs().maxCoeff();
  // Relative test for cross-component degeneracy, absolute test (against the
  // statistic's own scale) for a flat doubly-centered table.
  const double floor_abs = 1e-20 * std::max(1e-300, calib.stat_scale * calib.stat_scale);
  if (lambda_max <= floor_abs || es.eigenvalues().minCoeff() <= 1e-12 * lambda_max)
    throw Error(ErrorCode::singular_gamma, "singular finite-n variance matrix");
  const Eigen::VectorXd resid = sufficient_statistic(spec, pi) - calib.grad_z0;
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose() * resid / pi.size();
}

Eigen::VectorXd approx_mle_origin(const StatisticSpec& spec, const Permutation& pi) {
  return approx_mle_origin(make_origin_calibration(spec, pi.size()), spec, pi);
}

double approx_mle_origin_raw_gamma(const StatisticSpec& spec, const Permutation& pi) {
  if (spec.dimension() != 1)
    throw Error(ErrorCode::invalid_argument, "raw-gamma surrogate is scalar only");
  const double gamma = gram_matrix(spec, 512)(0, 0);
  if (gamma <= 0.0)
    throw Error(ErrorCode::singular_gamma, "vanishing raw second moment");
  const double t = sufficient_statistic(spec, pi)[0];
  const double z0 = grad_Z0(spec, pi.size())[0];
  return (t - z0) / (pi.size() * gamma);
}

}  // namespace permexp
