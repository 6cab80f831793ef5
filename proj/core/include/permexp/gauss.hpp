#pragma once

#include <vector>

namespace permexp {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF (Wichura's AS241), |error| < 1e-9 over (0,1).
double normal_quantile(double p);

// One-sample Kolmogorov-Smirnov statistic against N(mu, sigma^2).
double ks_statistic_normal(std::vector<double> sample, double mu, double sigma);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

// Chi-square upper quantile via the Wilson-Hilferty cube approximation;
// adequate for the goodness-of-fit gates used in tests.
double chi_square_quantile(double p, int dof);

}  // namespace permexp
