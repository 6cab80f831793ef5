#pragma once

#include <cmath>

namespace permexp {

// 1 / (1 + e^x), stable for |x| up to the full double range.
inline double inv_one_plus_exp(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// e^x / (1 + e^x)^2, the logistic variance weight.
inline double logistic_weight(double x) {
  const double s = inv_one_plus_exp(x);
  return s * (1.0 - s);
}

// log(1 + e^x) without overflow; branches at x > 0.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace permexp
