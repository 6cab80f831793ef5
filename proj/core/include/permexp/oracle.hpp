#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "permexp/model.hpp"

namespace permexp {

// Brute-force ground truth for n <= 8 (40320 states): exact normalizing
// constant, moments, model probabilities, MLE, and pair marginals. The
// anchor for every sampler / estimator test at small n.

inline constexpr int kOracleMaxN = 8;

long factorial(int n);

// Lexicographic rank of a permutation (Lehmer code); the index into the
// probability tables below.
long permutation_rank(const Permutation& pi);
Permutation permutation_from_rank(int n, long rank);

// Enumerates S_n in lexicographic order.
void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn);

class ExactModel {
 public:
  // Enumerates all n! permutations, caching T(pi) per state.
  ExactModel(const StatisticSpec& spec, int n);

  int n() const { return n_; }
  int dimension() const { return L_; }
  long states() const { return states_; }

  // T(pi) for the state with lexicographic rank `rank`.
  Eigen::VectorXd statistic(long rank) const;

  double log_partition(const ThetaVector& theta) const;
  Eigen::VectorXd mean(const ThetaVector& theta) const;          // E_theta T
  Eigen::MatrixXd variance(const ThetaVector& theta) const;      // Var_theta T
  // All n! probabilities, indexed by lexicographic rank.
  std::vector<double> distribution(const ThetaVector& theta) const;

  double log_probability(const ThetaVector& theta, const Permutation& pi) const;

  // Solves grad Z_n(theta) = T(pi) by Newton on the strictly convex exact
  // objective. Throws Error(boundary) when T(pi) lies on the boundary of the
  // convex hull of {T(sigma)} (the MLE diverges).
  ThetaVector mle(const Permutation& pi, double tol = 1e-12, int max_iters = 200) const;

  // The underlying moment equation E_theta T = target, for arbitrary targets
  // in the interior of the hull of {T(sigma)}.
  ThetaVector solve_moment_equation(const Eigen::VectorXd& target, double tol = 1e-12,
                                    int max_iters = 200) const;

  // P(pi(i)=a, pi(j)=b) for 0-indexed positions/values, flattened as
  // ((i*n + j)*n + a)*n + b. Entries with i==j or a==b are zero except the
  // diagonal-consistent P(pi(i)=a) convention is not stored here.
  std::vector<double> pair_marginals(const ThetaVector& theta) const;

  // Single-position marginals P(pi(i)=a), flattened i*n + a.
  std::vector<double> single_marginals(const ThetaVector& theta) const;

 private:
  const StatisticSpec* spec_;
  int n_ = 0;
  int L_ = 0;
  long states_ = 0;
  // Row `rank` holds T(pi_rank); stored densely, n <= 8 keeps this small.
  Eigen::MatrixXd stats_;
};

double exact_log_partition(const StatisticSpec& spec, const ThetaVector& theta, int n);
ThetaVector exact_mle(const StatisticSpec& spec, const Permutation& pi);
std::vector<double> exact_pair_marginals(const StatisticSpec& spec,
                                         const ThetaVector& theta, int n);

// Max over pairs (i,j), conditioning configurations, and components of
// | E[ y/(1+e^{theta.y}) | pi(l), l != i,j ] |; zero by the two-point
// conditional cancellation, enumerated exactly for n <= 5.
double verify_conditional_mean_zero(const StatisticSpec& spec, const ThetaVector& theta,
                                    int n);

}  // namespace permexp
