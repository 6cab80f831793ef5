#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "permexp/errors.hpp"

namespace permexp {

using ThetaVector = Eigen::VectorXd;

enum class Builtin {
  xy,            // f(x,y) = x*y
  neg_abs_diff,  // f(x,y) = -|x-y|
  neg_sq_diff,   // f(x,y) = -(x-y)^2
};

// m x m table of values at midpoint nodes ((k+1/2)/m, (l+1/2)/m), row-major
// in x. Evaluation is bilinear between nodes and extends the boundary cells
// linearly, so tabulating a bilinear function reproduces it exactly.
struct GridTable {
  int m = 0;
  std::vector<double> values;  // values[k * m + l] = f(x_k, y_l)

  double at(int k, int l) const { return values[static_cast<std::size_t>(k) * m + l]; }
  double eval(double x, double y) const;
};

using Component = std::variant<Builtin, GridTable>;

double eval_component(const Component& c, double x, double y);

// The vector statistic f = (f_1,...,f_L) : [0,1]^2 -> R^L defining the model.
class StatisticSpec {
 public:
  StatisticSpec() = default;
  StatisticSpec(std::vector<Component> components, bool centered = false);

  static StatisticSpec builtin(Builtin b);
  // Parses "xy", "neg_abs_diff", "neg_sq_diff" or a comma-separated list of
  // them for a multivariate spec.
  static StatisticSpec from_name(const std::string& name);

  int dimension() const { return static_cast<int>(components_.size()); }
  bool centered() const { return centered_; }
  const Component& component(int r) const { return components_[r]; }

  double eval(int r, double x, double y) const {
    return eval_component(components_[r], x, y);
  }
  void eval_all(double x, double y, double* out) const {
    for (int r = 0; r < dimension(); ++r) out[r] = eval(r, x, y);
  }
  Eigen::VectorXd eval_vector(double x, double y) const;

  // Largest |f_r| over an evaluation grid; used for overflow guards.
  double sup_norm(int resolution = 256) const;

 private:
  std::vector<Component> components_;
  bool centered_ = false;
};

// Replaces each component by f - rowavg(x) - colavg(y) + grandavg, tabulated
// on a `resolution` x `resolution` midpoint grid. The returned spec has the
// centered flag set; pair differences are unchanged by this projection.
StatisticSpec center_components(const StatisticSpec& spec, int resolution = 512);

// Max over components of the largest |row average| / |column average| on the
// midpoint grid; the double-centering check.
double max_marginal_average(const StatisticSpec& spec, int resolution = 512);

// Gram matrix \int f_p f_q by midpoint quadrature.
Eigen::MatrixXd gram_matrix(const StatisticSpec& spec, int resolution = 512);

// Minimum eigenvalue of the Gram matrix; callers reject the model when this
// is <= 1e-9 (exact linear dependence vs quadrature noise).
double check_linear_independence(const StatisticSpec& spec, int resolution = 512);

inline constexpr double kLinearIndependenceTol = 1e-9;

// Tabulated statistic text format: header "m L", then m*m lines of L
// space-separated reals in row-major (x-major) midpoint order.
void write_tabulated(std::ostream& out, const StatisticSpec& spec);
StatisticSpec read_tabulated(std::istream& in);
StatisticSpec read_tabulated_file(const std::string& path);
void write_tabulated_file(const std::string& path, const StatisticSpec& spec);

}  // namespace permexp
