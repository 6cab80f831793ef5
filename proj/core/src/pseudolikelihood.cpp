#include "permexp/pseudolikelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "permexp/logistic.hpp"
#include "permexp/parallel.hpp"

namespace permexp {

namespace {
constexpr int kTileRows = 128;
constexpr double kDegenerateEigenFactor = 1e-12;  // vs n^2, per contract
}  // namespace

PlObjective::PlObjective(const StatisticSpec& spec, const Permutation& pi)
    : spec_(&spec) {
  reset_permutation(pi);
}

void PlObjective::reset_permutation(const Permutation& pi) {
  pi_ = pi;
  const int n = pi_.size();
  const int L = spec_->dimension();
  diag_.resize(n, L);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < L; ++r)
      diag_(i, r) = spec_->eval(r, pi_.x_node(i), pi_.y_node(i));
}

namespace {

struct TileAccum {
  double neg_log = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

}  // namespace

void PlObjective::eval(const ThetaVector& theta, double* neg_log_out,
                       Eigen::VectorXd* gradient_out,
                       Eigen::MatrixXd* hessian_out) const {
  if (theta.size() != spec_->dimension())
    throw Error(ErrorCode::dimension_mismatch, "theta dimension != statistic dimension");
  ++evaluations_;
  const int n = pi_.size();
  const int L = spec_->dimension();
  const bool want_f = neg_log_out != nullptr;
  const bool want_g = gradient_out != nullptr;
  const bool want_h = hessian_out != nullptr;

  const int tiles = (n + kTileRows - 1) / kTileRows;
  std::vector<TileAccum> acc(std::max(tiles, 1));
  for (auto& a : acc) {
    if (want_g) a.grad = Eigen::VectorXd::Zero(L);
    if (want_h) a.hess = Eigen::MatrixXd::Zero(L, L);
  }

  const StatisticSpec& spec = *spec_;
  // Fixed tile -> accumulator mapping keeps the summation order identical
  // whether or not tiles run concurrently.
  run_tiles(static_cast<std::size_t>(std::max(tiles, 1)), 1, [&](std::size_t t) {
    TileAccum& a = acc[t];
    std::vector<double> y(L);
    const int i_begin = static_cast<int>(t) * kTileRows;
    const int i_end = std::min(i_begin + kTileRows, n);
    for (int i = i_begin; i < i_end; ++i) {
      const double xi = pi_.x_node(i), yi = pi_.y_node(i);
      for (int j = i + 1; j < n; ++j) {
        const double xj = pi_.x_node(j), yj = pi_.y_node(j);
        double dot = 0.0;
        for (int r = 0; r < L; ++r) {
          y[r] = (diag_(i, r) - spec.eval(r, xi, yj)) +
                 (diag_(j, r) - spec.eval(r, xj, yi));
          dot += theta[r] * y[r];
        }
        const double e = std::exp(-std::abs(dot));
        if (want_f) a.neg_log += dot >= 0.0 ? std::log1p(e) : std::log1p(e) - dot;
        if (want_g || want_h) {
          // w = 1/(1+e^dot); Hessian weight w(1-w) = e^dot/(1+e^dot)^2.
          const double w = dot >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
          if (want_g)
            for (int r = 0; r < L; ++r) a.grad[r] += w * y[r];
          if (want_h) {
            const double hw = w * (1.0 - w);
            for (int p = 0; p < L; ++p)
              for (int q = p; q < L; ++q) a.hess(p, q) += hw * y[p] * y[q];
          }
        }
      }
    }
  });

  if (want_f) *neg_log_out = 0.0;
  if (want_g) *gradient_out = Eigen::VectorXd::Zero(L);
  if (want_h) *hessian_out = Eigen::MatrixXd::Zero(L, L);
  for (const auto& a : acc) {
    if (want_f) *neg_log_out += a.neg_log;
    if (want_g) *gradient_out += a.grad;
    if (want_h) *hessian_out += a.hess;
  }
  if (want_h)
    for (int p = 0; p < L; ++p)
      for (int q = 0; q < p; ++q) (*hessian_out)(p, q) = (*hessian_out)(q, p);
}

double PlObjective::neg_log(const ThetaVector& theta) const {
  double f = 0.0;
  eval(theta, &f, nullptr, nullptr);
  return f;
}

Eigen::VectorXd PlObjective::gradient(const ThetaVector& theta) const {
  Eigen::VectorXd g;
  eval(theta, nullptr, &g, nullptr);
  return g;
}

Eigen::MatrixXd PlObjective::hessian(const ThetaVector& theta) const {
  Eigen::MatrixXd h;
  eval(theta, nullptr, nullptr, &h);
  return h;
}

double PlObjective::max_abs_y() const {
  const int n = pi_.size();
  const int L = spec_->dimension();
  double worst = 0.0;
  std::vector<double> y(L);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      pair_difference_into(*spec_, pi_, i, j, y.data());
      for (int r = 0; r < L; ++r) worst = std::max(worst, std::abs(y[r]));
    }
  return worst;
}

double pl_neg_log(const StatisticSpec& spec, const Permutation& pi,
                  const ThetaVector& theta) {
  return PlObjective(spec, pi).neg_log(theta);
}

Eigen::VectorXd pl_gradient(const StatisticSpec& spec, const Permutation& pi,
                            const ThetaVector& theta) {
  return PlObjective(spec, pi).gradient(theta);
}

Eigen::MatrixXd pl_hessian(const StatisticSpec& spec, const Permutation& pi,
                           const ThetaVector& theta) {
  return PlObjective(spec, pi).hessian(theta);
}

namespace {

// Largest |v . y_pi(i,j)| over pairs; used by the degeneracy check.
double max_abs_projection(const PlObjective& obj, const Eigen::VectorXd& v) {
  const auto& pi = obj.permutation();
  const auto& spec = obj.spec();
  const int n = pi.size();
  const int L = spec.dimension();
  std::vector<double> y(L);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      pair_difference_into(spec, pi, i, j, y.data());
      double dot = 0.0;
      for (int r = 0; r < L; ++r) dot += v[r] * y[r];
      worst = std::max(worst, std::abs(dot));
    }
  return worst;
}

SolveReport bisect_scalar(const PlObjective& obj, double tol, double scale) {
  // L_n is non-increasing in theta (its derivative is -H <= 0), so a sign
  // change brackets the unique root.
  auto grad_at = [&](double t) {
    ThetaVector th(1);
    th[0] = t;
    return obj.gradient(th)[0];
  };
  // A genuine root is a strict sign change: the gradient of a boundary
  // observation decays to zero at infinity without ever crossing it, and
  // underflows to (signed) zero numerically, so non-strict tests would
  // accept a phantom root.
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int k = 0; k <= 30; ++k) {
    const double w = std::ldexp(1.0, k);  // 2^k
    if (grad_at(-w) > 0.0 && grad_at(w) < 0.0) {
      lo = -w;
      hi = w;
      bracketed = true;
      break;
    }
  }
  if (!bracketed)
    throw Error(ErrorCode::no_bracket,
                "pseudo-likelihood gradient has constant sign on [-2^30, 2^30]");
  SolveReport rep;
  rep.root = ThetaVector::Zero(1);
  double gmid = 0.0;
  int iters = 0;
  for (; iters < 200; ++iters) {
    const double mid = 0.5 * (lo + hi);
    gmid = grad_at(mid);
    if (gmid > 0.0)
      lo = mid;
    else
      hi = mid;
    if (std::abs(gmid) * scale <= tol) {
      rep.root[0] = mid;
      rep.converged = true;
      break;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) {
      rep.root[0] = mid;
      rep.converged = std::abs(gmid) * scale <= tol;
      break;
    }
  }
  if (iters == 200) rep.root[0] = 0.5 * (lo + hi);
  rep.iterations = iters;
  rep.grad_norm_scaled = std::abs(gmid) * scale;
  rep.hessian_cond = 1.0;
  return rep;
}

}  // namespace

SolveReport solve_ple(const PlObjective& obj, const ThetaVector& theta_init,
                      const SolveOptions& opts) {
  const int L = obj.dimension();
  const int n = obj.n();
  if (theta_init.size() != L)
    throw Error(ErrorCode::dimension_mismatch, "theta_init dimension mismatch");
  const double scale = std::pow(static_cast<double>(n), -1.5);

  ThetaVector theta = theta_init;
  double f;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  obj.eval(theta, &f, &grad, &hess);

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const double lambda_min = es.eigenvalues().minCoeff();
    if (lambda_min <= kDegenerateEigenFactor * static_cast<double>(n) * n) {
      const Eigen::VectorXd v = es.eigenvectors().col(0);
      const double proj = max_abs_projection(obj, v);
      if (proj <= 1e-9 * (1.0 + obj.max_abs_y()))
        throw Error(ErrorCode::degenerate,
                    "pair differences span a proper subspace; the root is not identified");
    }
  }

  SolveReport rep;
  rep.root = theta;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    rep.grad_norm_scaled = grad.norm() * scale;
    if (rep.grad_norm_scaled <= opts.tol) {
      rep.converged = true;
      break;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const double lambda_max = es.eigenvalues().maxCoeff();
    const double floor = std::max(lambda_max, 1.0) * 1e-14;
    Eigen::VectorXd inv_ev = es.eigenvalues().cwiseMax(floor).cwiseInverse();
    rep.hessian_cond = lambda_max / std::max(es.eigenvalues().minCoeff(), floor);
    // Newton direction for minimizing -log PL: step = H^{-1} L_n.
    const Eigen::VectorXd step =
        es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose() * grad;

    // Near the root the objective decrease falls below the floating-point
    // resolution of a sum over n^2 pairs (|f| can be ~1e6); inside that
    // resolution band a shrinking gradient norm is the progress signal.
    const double f_slack =
        16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    double t = 1.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      const ThetaVector cand = theta + t * step;
      double fc;
      Eigen::VectorXd gc;
      obj.eval(cand, &fc, &gc, nullptr);
      if (fc < f - f_slack || (fc <= f + f_slack && gc.norm() < grad.norm())) {
        theta = cand;
        f = fc;
        grad = gc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++rep.iterations;
    if (!accepted) break;
    rep.grad_norm_scaled = grad.norm() * scale;
    if (rep.grad_norm_scaled <= opts.tol) {
      rep.converged = true;
      break;
    }
    obj.eval(theta, nullptr, nullptr, &hess);
  }
  rep.root = theta;
  rep.grad_norm_scaled = grad.norm() * scale;
  if (!rep.converged && rep.grad_norm_scaled <= opts.tol) rep.converged = true;

  if (L == 1) {
    bool genuine = false;
    if (rep.converged) {
      // Confirm the root is an interior sign change, not a gradient that
      // merely underflowed in an exponential tail (boundary observation).
      ThetaVector probe(1);
      probe[0] = theta[0] - 1.0;
      const double left = obj.gradient(probe)[0];
      probe[0] = theta[0] + 1.0;
      const double right = obj.gradient(probe)[0];
      genuine = left > 0.0 && right < 0.0;
    }
    if (!genuine) {
      // Monotone scalar gradient: fall back to bisection over an expanding
      // bracket. Throws no_bracket when no strict sign change exists.
      SolveReport bis = bisect_scalar(obj, opts.tol, scale);
      bis.iterations += rep.iterations;
      return bis;
    }
  }
  return rep;
}

SolveReport solve_ple(const StatisticSpec& spec, const Permutation& pi,
                      const ThetaVector& theta_init, const SolveOptions& opts) {
  PlObjective obj(spec, pi);
  return solve_ple(obj, theta_init, opts);
}

SolveReport solve_ple(const StatisticSpec& spec, const Permutation& pi,
                      const SolveOptions& opts) {
  return solve_ple(spec, pi, ThetaVector::Zero(spec.dimension()), opts);
}

}  // namespace permexp
