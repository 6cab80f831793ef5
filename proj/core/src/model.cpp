#include "permexp/model.hpp"

namespace permexp {

Eigen::VectorXd sufficient_statistic(const StatisticSpec& spec, const Permutation& pi) {
  const int L = spec.dimension();
  Eigen::VectorXd t = Eigen::VectorXd::Zero(L);
  for (int i = 0; i < pi.size(); ++i) {
    const double x = pi.x_node(i), y = pi.y_node(i);
    for (int r = 0; r < L; ++r) t[r] += spec.eval(r, x, y);
  }
  return t;
}

Eigen::VectorXd pair_difference(const StatisticSpec& spec, const Permutation& pi,
                                int i, int j) {
  if (i == j)
    throw Error(ErrorCode::invalid_argument, "pair_difference requires i != j");
  if (i < 0 || j < 0 || i >= pi.size() || j >= pi.size())
    throw Error(ErrorCode::invalid_argument, "pair_difference index out of range");
  Eigen::VectorXd y(spec.dimension());
  pair_difference_into(spec, pi, i, j, y.data());
  return y;
}

Eigen::VectorXd g_kernel(const StatisticSpec& spec, double x1, double y1,
                         double x2, double y2) {
  const int L = spec.dimension();
  Eigen::VectorXd g(L);
  for (int r = 0; r < L; ++r) g[r] = g_kernel_component(spec, r, x1, y1, x2, y2);
  return g;
}

}  // namespace permexp
