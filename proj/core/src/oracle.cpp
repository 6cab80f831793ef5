#include "permexp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "permexp/logistic.hpp"

namespace permexp {

long factorial(int n) {
  long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long permutation_rank(const Permutation& pi) {
  const int n = pi.size();
  long rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (pi.image(j) < pi.image(i)) ++smaller;
    rank += smaller * factorial(n - 1 - i);
  }
  return rank;
}

Permutation permutation_from_rank(int n, long rank) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> img(n);
  for (int i = 0; i < n; ++i) {
    const long f = factorial(n - 1 - i);
    const long idx = rank / f;
    rank %= f;
    img[i] = pool[idx];
    pool.erase(pool.begin() + idx);
  }
  return Permutation(std::move(img));
}

void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  do {
    fn(Permutation(img));
  } while (std::next_permutation(img.begin(), img.end()));
}

ExactModel::ExactModel(const StatisticSpec& spec, int n)
    : spec_(&spec), n_(n), L_(spec.dimension()) {
  if (n < 1 || n > kOracleMaxN)
    throw Error(ErrorCode::invalid_argument, "exact enumeration supports 1 <= n <= 8");
  states_ = factorial(n);
  stats_.resize(states_, L_);

  // Lexicographic sweep with incremental updates: after next_permutation only
  // a suffix changes, so only those position contributions are recomputed.
  std::vector<int> img(n), prev(n);
  std::iota(img.begin(), img.end(), 0);
  Eigen::MatrixXd contrib(n, L_);  // contrib(i, r) = f_r(x_i, y_{img[i]})
  Eigen::VectorXd total = Eigen::VectorXd::Zero(L_);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) / n;
    const double y = static_cast<double>(img[i] + 1) / n;
    for (int r = 0; r < L_; ++r) {
      contrib(i, r) = spec.eval(r, x, y);
      total[r] += contrib(i, r);
    }
  }
  long rank = 0;
  for (;;) {
    stats_.row(rank++) = total;
    prev = img;
    if (!std::next_permutation(img.begin(), img.end())) break;
    int first = 0;
    while (img[first] == prev[first]) ++first;
    for (int i = first; i < n; ++i) {
      const double x = static_cast<double>(i + 1) / n;
      const double y = static_cast<double>(img[i] + 1) / n;
      for (int r = 0; r < L_; ++r) {
        total[r] -= contrib(i, r);
        contrib(i, r) = spec.eval(r, x, y);
        total[r] += contrib(i, r);
      }
    }
  }
}

Eigen::VectorXd ExactModel::statistic(long rank) const { return stats_.row(rank); }

double ExactModel::log_partition(const ThetaVector& theta) const {
  if (theta.size() != L_)
    throw Error(ErrorCode::dimension_mismatch, "theta dimension mismatch");
  const Eigen::VectorXd dots = stats_ * theta;
  const double shift = dots.maxCoeff();
  return shift + std::log((dots.array() - shift).exp().sum());
}

std::vector<double> ExactModel::distribution(const ThetaVector& theta) const {
  const Eigen::VectorXd dots = stats_ * theta;
  const double shift = dots.maxCoeff();
  Eigen::ArrayXd w = (dots.array() - shift).exp();
  w /= w.sum();
  return {w.data(), w.data() + w.size()};
}

Eigen::VectorXd ExactModel::mean(const ThetaVector& theta) const {
  const auto probs = distribution(theta);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(L_);
  for (long s = 0; s < states_; ++s) mu += probs[s] * stats_.row(s).transpose();
  return mu;
}

Eigen::MatrixXd ExactModel::variance(const ThetaVector& theta) const {
  const auto probs = distribution(theta);
  const Eigen::VectorXd mu = mean(theta);
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(L_, L_);
  for (long s = 0; s < states_; ++s) {
    const Eigen::VectorXd d = stats_.row(s).transpose() - mu;
    var.noalias() += probs[s] * d * d.transpose();
  }
  return var;
}

double ExactModel::log_probability(const ThetaVector& theta, const Permutation& pi) const {
  return theta.dot(sufficient_statistic(*spec_, pi)) - log_partition(theta);
}

ThetaVector ExactModel::mle(const Permutation& pi, double tol, int max_iters) const {
  return solve_moment_equation(sufficient_statistic(*spec_, pi), tol, max_iters);
}

ThetaVector ExactModel::solve_moment_equation(const Eigen::VectorXd& target, double tol,
                                              int max_iters) const {
  // Hull boundary is exact in one dimension; in higher dimensions divergence
  // of the Newton iterates is the detector.
  if (L_ == 1) {
    const double lo = stats_.col(0).minCoeff(), hi = stats_.col(0).maxCoeff();
    if (target[0] <= lo + 1e-12 || target[0] >= hi - 1e-12)
      throw Error(ErrorCode::boundary, "T(pi) attains the convex hull boundary");
  }
  ThetaVector theta = ThetaVector::Zero(L_);
  double obj = log_partition(theta) - theta.dot(target);
  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::VectorXd g = mean(theta) - target;
    if (g.norm() <= tol) return theta;
    const Eigen::MatrixXd h = variance(theta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double floor = std::max(es.eigenvalues().maxCoeff(), 1.0) * 1e-14;
    const Eigen::VectorXd step = -(es.eigenvectors() *
                                   es.eigenvalues().cwiseMax(floor).cwiseInverse().asDiagonal() *
                                   es.eigenvectors().transpose() * g);
    double t = 1.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      const ThetaVector cand = theta + t * step;
      const double cand_obj = log_partition(cand) - cand.dot(target);
      if (cand_obj < obj) {
        theta = cand;
        obj = cand_obj;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || theta.norm() > 1e3)
      throw Error(ErrorCode::boundary, "MLE diverges; T(pi) is on the hull boundary");
  }
  if ((mean(theta) - target).norm() > tol * 10)
    throw Error(ErrorCode::boundary, "MLE Newton failed to converge");
  return theta;
}

std::vector<double> ExactModel::pair_marginals(const ThetaVector& theta) const {
  const auto probs = distribution(theta);
  const std::size_t n = n_;
  std::vector<double> table(n * n * n * n, 0.0);
  long rank = 0;
  for_each_permutation(n_, [&](const Permutation& pi) {
    const double p = probs[rank++];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const std::size_t a = pi.image(static_cast<int>(i));
        const std::size_t b = pi.image(static_cast<int>(j));
        table[((i * n + j) * n + a) * n + b] += p;
      }
  });
  return table;
}

std::vector<double> ExactModel::single_marginals(const ThetaVector& theta) const {
  const auto probs = distribution(theta);
  const std::size_t n = n_;
  std::vector<double> table(n * n, 0.0);
  long rank = 0;
  for_each_permutation(n_, [&](const Permutation& pi) {
    const double p = probs[rank++];
    for (std::size_t i = 0; i < n; ++i)
      table[i * n + pi.image(static_cast<int>(i))] += p;
  });
  return table;
}

double exact_log_partition(const StatisticSpec& spec, const ThetaVector& theta, int n) {
  return ExactModel(spec, n).log_partition(theta);
}

ThetaVector exact_mle(const StatisticSpec& spec, const Permutation& pi) {
  return ExactModel(spec, pi.size()).mle(pi);
}

std::vector<double> exact_pair_marginals(const StatisticSpec& spec,
                                         const ThetaVector& theta, int n) {
  return ExactModel(spec, n).pair_marginals(theta);
}

double verify_conditional_mean_zero(const StatisticSpec& spec, const ThetaVector& theta,
                                    int n) {
  if (n < 2 || n > 5)
    throw Error(ErrorCode::invalid_argument, "conditional-mean check supports 2 <= n <= 5");
  const int L = spec.dimension();
  double worst = 0.0;
  // Every conditioning configuration is an unordered pair of completions
  // {sigma, sigma o (i j)}; visit each once via img[i] < img[j].
  for_each_permutation(n, [&](const Permutation& sigma) {
    const Eigen::VectorXd t_sigma = sufficient_statistic(spec, sigma);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (sigma.image(i) >= sigma.image(j)) continue;
        std::vector<int> img = sigma.images();
        std::swap(img[i], img[j]);
        const Permutation tau{std::move(img)};

        const Eigen::VectorXd y_sigma = pair_difference(spec, sigma, i, j);
        const Eigen::VectorXd y_tau = -y_sigma;
        // Unnormalized conditional weights; the off-pair factor cancels.
        const double d_sigma = theta.dot(t_sigma);
        const double d_tau = theta.dot(sufficient_statistic(spec, tau));
        const double shift = std::max(d_sigma, d_tau);
        const double w_sigma = std::exp(d_sigma - shift);
        const double w_tau = std::exp(d_tau - shift);

        const double c_sigma = inv_one_plus_exp(theta.dot(y_sigma));
        const double c_tau = inv_one_plus_exp(theta.dot(y_tau));
        for (int r = 0; r < L; ++r) {
          const double cond_mean = (w_sigma * c_sigma * y_sigma[r] +
                                    w_tau * c_tau * y_tau[r]) /
                                   (w_sigma + w_tau);
          worst = std::max(worst, std::abs(cond_mean));
        }
      }
  });
  return worst;
}

}  // namespace permexp
