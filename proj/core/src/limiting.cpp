#include "permexp/limiting.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "permexp/logistic.hpp"
#include "permexp/parallel.hpp"

namespace permexp {

namespace {

// theta.f(x_k, y_l) at midpoint nodes, row-major in x.
std::vector<double> dot_table(const StatisticSpec& spec, const ThetaVector& theta, int m) {
  std::vector<double> t(static_cast<std::size_t>(m) * m);
  for (int k = 0; k < m; ++k) {
    const double x = (k + 0.5) / m;
    for (int l = 0; l < m; ++l) {
      const double y = (l + 0.5) / m;
      double dot = 0.0;
      for (int r = 0; r < spec.dimension(); ++r) dot += theta[r] * spec.eval(r, x, y);
      t[static_cast<std::size_t>(k) * m + l] = dot;
    }
  }
  return t;
}

std::vector<std::vector<double>> component_tables(const StatisticSpec& spec, int m) {
  std::vector<std::vector<double>> f(spec.dimension());
  for (int r = 0; r < spec.dimension(); ++r) {
    f[r].resize(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
      const double x = (k + 0.5) / m;
      for (int l = 0; l < m; ++l)
        f[r][static_cast<std::size_t>(k) * m + l] = spec.eval(r, x, (l + 0.5) / m);
    }
  }
  return f;
}

double log_mean_exp(const double* vals, int count) {
  double shift = vals[0];
  for (int i = 1; i < count; ++i) shift = std::max(shift, vals[i]);
  double sum = 0.0;
  for (int i = 0; i < count; ++i) sum += std::exp(vals[i] - shift);
  return shift + std::log(sum / count);
}

}  // namespace

CouplingGrid sinkhorn_density(const StatisticSpec& spec, const ThetaVector& theta,
                              int m, const SinkhornOptions& opts) {
  if (theta.size() != spec.dimension())
    throw Error(ErrorCode::dimension_mismatch, "theta dimension != statistic dimension");
  if (!theta.allFinite())
    throw Error(ErrorCode::invalid_argument, "theta must be finite");
  if (m < 2) throw Error(ErrorCode::invalid_argument, "grid resolution must be >= 2");

  CouplingGrid grid;
  grid.m = m;
  grid.theta = theta;
  grid.a.assign(m, 0.0);
  grid.b.assign(m, 0.0);
  grid.density.assign(static_cast<std::size_t>(m) * m, 1.0);

  const std::vector<double> t = dot_table(spec, theta, m);
  std::vector<double> scratch(m);
  double err = 0.0;
  long iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    // Row scaling: make every row mean of exp(t + a + b) equal to 1.
    for (int k = 0; k < m; ++k) {
      const double* row = &t[static_cast<std::size_t>(k) * m];
      for (int l = 0; l < m; ++l) scratch[l] = row[l] + grid.b[l];
      grid.a[k] = -log_mean_exp(scratch.data(), m);
    }
    // Column scaling.
    for (int l = 0; l < m; ++l) {
      for (int k = 0; k < m; ++k)
        scratch[k] = t[static_cast<std::size_t>(k) * m + l] + grid.a[k];
      grid.b[l] = -log_mean_exp(scratch.data(), m);
    }
    // Marginal feasibility of the current density.
    err = 0.0;
    std::vector<double> col_mean(m, 0.0);
    for (int k = 0; k < m; ++k) {
      double row_mean = 0.0;
      for (int l = 0; l < m; ++l) {
        const double rho = std::exp(t[static_cast<std::size_t>(k) * m + l] +
                                    grid.a[k] + grid.b[l]);
        grid.density[static_cast<std::size_t>(k) * m + l] = rho;
        row_mean += rho;
        col_mean[l] += rho;
      }
      err = std::max(err, std::abs(row_mean / m - 1.0));
    }
    for (int l = 0; l < m; ++l) err = std::max(err, std::abs(col_mean[l] / m - 1.0));
    if (iter % 100 == 0) grid.error_trace.push_back(err);
    if (err <= opts.tol) break;
  }
  if (err > opts.tol)
    throw Error(ErrorCode::max_iters_exceeded,
                "sinkhorn did not reach tolerance; last marginal error " +
                    std::to_string(err));
  grid.iterations = static_cast<int>(iter + 1);
  grid.marginal_error = err;
  if (grid.error_trace.empty() || grid.error_trace.back() != err)
    grid.error_trace.push_back(err);

  // Gauge: split the free additive constant so that sum(a) = sum(b). The
  // density is unchanged.
  double mean_a = 0.0, mean_b = 0.0;
  for (int k = 0; k < m; ++k) {
    mean_a += grid.a[k];
    mean_b += grid.b[k];
  }
  const double shift = (mean_b - mean_a) / (2.0 * m);
  for (int k = 0; k < m; ++k) {
    grid.a[k] += shift;
    grid.b[k] -= shift;
  }
  return grid;
}

Eigen::VectorXd limiting_z_vector(const CouplingGrid& grid, const StatisticSpec& spec) {
  const int m = grid.m;
  const int L = spec.dimension();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(L);
  for (int k = 0; k < m; ++k) {
    const double x = grid.node(k);
    for (int l = 0; l < m; ++l) {
      const double rho = grid.rho(k, l);
      for (int r = 0; r < L; ++r) z[r] += rho * spec.eval(r, x, grid.node(l));
    }
  }
  return z / (static_cast<double>(m) * m);
}

double limiting_log_partition(const CouplingGrid& grid, const StatisticSpec& spec,
                              const ThetaVector& theta) {
  const int m = grid.m;
  const Eigen::VectorXd z = limiting_z_vector(grid, spec);
  double entropy_term = 0.0;  // D(mu || u) = Int rho log rho
  for (double rho : grid.density) entropy_term += rho * std::log(rho);
  entropy_term /= static_cast<double>(m) * m;
  return theta.dot(z) - entropy_term;
}

namespace {

struct QuadTile {
  Eigen::MatrixXd a_part;
};

// Shared m^4 sweep for Sigma and A. The logistic argument theta.g(z1,z2)
// factors over the four corners, so exp(theta.g) is a product of two table
// lookups and two reciprocal lookups; no exp() in the inner loop when the
// exponents are moderate.
void quadrature_sweep(const CouplingGrid& grid, const StatisticSpec& spec,
                      const ThetaVector& theta, Eigen::MatrixXd* sigma_out,
                      Eigen::MatrixXd* a_out, int threads) {
  const int m = grid.m;
  const int L = spec.dimension();
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  const auto f = component_tables(spec, m);
  const auto t = dot_table(spec, theta, m);

  double t_max = 0.0;
  for (double v : t) t_max = std::max(t_max, std::abs(v));
  const bool fast = t_max <= 100.0;  // |theta.g| <= 400, exp stays finite

  std::vector<double> exp_t(mm), inv_exp_t(mm);
  if (fast) {
    for (std::size_t i = 0; i < mm; ++i) {
      exp_t[i] = std::exp(t[i]);
      inv_exp_t[i] = 1.0 / exp_t[i];
    }
  }

  // s[z1*L + r] = (1/m^2) sum_z2 rho(z2) g_r(z1,z2) / (1 + e^{theta.g}).
  std::vector<double> s(mm * L, 0.0);
  std::vector<QuadTile> tiles(m);
  const double* rho = grid.density.data();

  run_tiles(static_cast<std::size_t>(m), threads, [&](std::size_t tile) {
    const int k1 = static_cast<int>(tile);
    Eigen::MatrixXd a_acc = Eigen::MatrixXd::Zero(L, L);
    std::vector<double> g(L);
    for (int l1 = 0; l1 < m; ++l1) {
      const std::size_t z1 = static_cast<std::size_t>(k1) * m + l1;
      const double rho1 = rho[z1];
      double* s_row = &s[z1 * L];
      const double e11 = fast ? exp_t[z1] : 0.0;
      for (int k2 = 0; k2 < m; ++k2) {
        const std::size_t row2 = static_cast<std::size_t>(k2) * m;
        const double cross = fast ? e11 * inv_exp_t[row2 + l1] : 0.0;
        for (int l2 = 0; l2 < m; ++l2) {
          const double rho2 = rho[row2 + l2];
          for (int r = 0; r < L; ++r) {
            const double* fr = f[r].data();
            g[r] = (fr[z1] - fr[static_cast<std::size_t>(k1) * m + l2]) +
                   (fr[row2 + l2] - fr[row2 + l1]);
          }
          double w;   // 1 / (1 + e^{theta.g})
          double hw;  // e^{theta.g} / (1 + e^{theta.g})^2
          if (fast) {
            const double eg = cross * exp_t[row2 + l2] *
                              inv_exp_t[static_cast<std::size_t>(k1) * m + l2];
            w = 1.0 / (1.0 + eg);
            hw = eg * w * w;
          } else {
            double dot = 0.0;
            for (int r = 0; r < L; ++r) dot += theta[r] * g[r];
            w = inv_one_plus_exp(dot);
            hw = w * (1.0 - w);
          }
          for (int r = 0; r < L; ++r) s_row[r] += g[r] * w * rho2;
          const double coeff = rho1 * rho2 * hw;
          for (int p = 0; p < L; ++p)
            for (int q = p; q < L; ++q) a_acc(p, q) += coeff * g[p] * g[q];
        }
      }
    }
    tiles[tile].a_part = std::move(a_acc);
  });

  const double mm_d = static_cast<double>(mm);
  if (a_out) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(L, L);
    for (const auto& tile : tiles) a += tile.a_part;
    a /= 2.0 * mm_d * mm_d;
    for (int p = 0; p < L; ++p)
      for (int q = 0; q < p; ++q) a(p, q) = a(q, p);
    *a_out = a;
  }
  if (sigma_out) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(L, L);
    for (std::size_t z1 = 0; z1 < mm; ++z1) {
      const double weight = rho[z1];
      const double* s_row = &s[z1 * L];
      for (int p = 0; p < L; ++p)
        for (int q = p; q < L; ++q) sigma(p, q) += weight * s_row[p] * s_row[q];
    }
    sigma /= mm_d * mm_d * mm_d;
    for (int p = 0; p < L; ++p)
      for (int q = 0; q < p; ++q) sigma(p, q) = sigma(q, p);
    *sigma_out = sigma;
  }
}

}  // namespace

void sigma_a_matrices(const CouplingGrid& grid, const StatisticSpec& spec,
                      const ThetaVector& theta, Eigen::MatrixXd* sigma_out,
                      Eigen::MatrixXd* a_out, int threads) {
  quadrature_sweep(grid, spec, theta, sigma_out, a_out, threads);
}

Eigen::MatrixXd sigma_matrix(const CouplingGrid& grid, const StatisticSpec& spec,
                             const ThetaVector& theta, int threads) {
  Eigen::MatrixXd sigma;
  quadrature_sweep(grid, spec, theta, &sigma, nullptr, threads);
  return sigma;
}

Eigen::MatrixXd a_matrix(const CouplingGrid& grid, const StatisticSpec& spec,
                         const ThetaVector& theta, int threads) {
  Eigen::MatrixXd a;
  quadrature_sweep(grid, spec, theta, nullptr, &a, threads);
  return a;
}

Eigen::MatrixXd gamma_matrix(const StatisticSpec& spec, int m) {
  if (!spec.centered())
    throw Error(ErrorCode::not_centered,
                "gamma_matrix requires a doubly centered statistic");
  return gram_matrix(spec, m);
}

Eigen::MatrixXd asymptotic_ple_cov(const CouplingGrid& grid, const StatisticSpec& spec,
                                   const ThetaVector& theta, int threads) {
  Eigen::MatrixXd sigma, a;
  quadrature_sweep(grid, spec, theta, &sigma, &a, threads);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double lambda_max = es.eigenvalues().cwiseAbs().maxCoeff();
  if (lambda_max <= 0.0 || es.eigenvalues().minCoeff() <= 1e-12 * lambda_max)
    throw Error(ErrorCode::singular_a_hat, "A(theta) is singular");
  const Eigen::MatrixXd a_inv = es.eigenvectors() *
                                es.eigenvalues().cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
  Eigen::MatrixXd cov = a_inv * sigma * a_inv;
  return ((cov + cov.transpose()) / 2.0).eval();
}

}  // namespace permexp
