#include "permexp/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace permexp {

double GridTable::eval(double x, double y) const {
  // Bilinear between midpoint nodes; boundary cells extend linearly so the
  // function stays defined (and bilinear) on all of [0,1]^2.
  const double u = x * m - 0.5;
  const double v = y * m - 0.5;
  int k0 = static_cast<int>(std::floor(u));
  int l0 = static_cast<int>(std::floor(v));
  k0 = std::clamp(k0, 0, m - 2);
  l0 = std::clamp(l0, 0, m - 2);
  const double s = u - k0;
  const double t = v - l0;
  const double f00 = at(k0, l0), f01 = at(k0, l0 + 1);
  const double f10 = at(k0 + 1, l0), f11 = at(k0 + 1, l0 + 1);
  return (1 - s) * ((1 - t) * f00 + t * f01) + s * ((1 - t) * f10 + t * f11);
}

double eval_component(const Component& c, double x, double y) {
  if (const auto* b = std::get_if<Builtin>(&c)) {
    switch (*b) {
      case Builtin::xy:
        return x * y;
      case Builtin::neg_abs_diff:
        return -std::abs(x - y);
      case Builtin::neg_sq_diff:
        return -(x - y) * (x - y);
    }
  }
  return std::get<GridTable>(c).eval(x, y);
}

namespace {

// Row/column averages of a component; tabulated components are checked on
// their own grid (where centering produced exact zeros), built-ins on a
// fixed midpoint grid.
double component_marginal_average(const Component& c) {
  if (const auto* g = std::get_if<GridTable>(&c)) {
    double worst = 0.0;
    for (int k = 0; k < g->m; ++k) {
      double row = 0.0, col = 0.0;
      for (int l = 0; l < g->m; ++l) {
        row += g->at(k, l);
        col += g->at(l, k);
      }
      worst = std::max({worst, std::abs(row / g->m), std::abs(col / g->m)});
    }
    return worst;
  }
  const int m = 256;
  double worst = 0.0;
  for (int k = 0; k < m; ++k) {
    const double x = (k + 0.5) / m;
    double row = 0.0, col = 0.0;
    for (int l = 0; l < m; ++l) {
      const double y = (l + 0.5) / m;
      row += eval_component(c, x, y);
      col += eval_component(c, y, x);
    }
    worst = std::max({worst, std::abs(row / m), std::abs(col / m)});
  }
  return worst;
}

}  // namespace

StatisticSpec::StatisticSpec(std::vector<Component> components, bool centered)
    : components_(std::move(components)), centered_(centered) {
  if (components_.empty())
    throw Error(ErrorCode::invalid_argument, "statistic needs at least one component");
  for (const auto& c : components_) {
    if (const auto* g = std::get_if<GridTable>(&c)) {
      if (g->m < 2 || g->values.size() != static_cast<std::size_t>(g->m) * g->m)
        throw Error(ErrorCode::invalid_argument, "malformed statistic grid");
      for (double v : g->values)
        if (!std::isfinite(v))
          throw Error(ErrorCode::invalid_argument, "non-finite statistic grid value");
    }
    if (centered_ && component_marginal_average(c) >= 1e-9)
      throw Error(ErrorCode::not_centered,
                  "centered flag set but component marginal averages exceed 1e-9");
  }
}

StatisticSpec StatisticSpec::builtin(Builtin b) {
  return StatisticSpec(std::vector<Component>{b}, false);
}

StatisticSpec StatisticSpec::from_name(const std::string& name) {
  std::vector<Component> comps;
  std::stringstream ss(name);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "xy")
      comps.emplace_back(Builtin::xy);
    else if (tok == "neg_abs_diff")
      comps.emplace_back(Builtin::neg_abs_diff);
    else if (tok == "neg_sq_diff")
      comps.emplace_back(Builtin::neg_sq_diff);
    else
      throw Error(ErrorCode::invalid_argument, "unknown statistic name: " + tok);
  }
  return StatisticSpec(std::move(comps), false);
}

Eigen::VectorXd StatisticSpec::eval_vector(double x, double y) const {
  Eigen::VectorXd out(dimension());
  eval_all(x, y, out.data());
  return out;
}

double StatisticSpec::sup_norm(int resolution) const {
  double sup = 0.0;
  for (int r = 0; r < dimension(); ++r) {
    for (int k = 0; k < resolution; ++k) {
      const double x = (k + 0.5) / resolution;
      for (int l = 0; l < resolution; ++l) {
        const double y = (l + 0.5) / resolution;
        sup = std::max(sup, std::abs(eval(r, x, y)));
      }
    }
  }
  return sup;
}

StatisticSpec center_components(const StatisticSpec& spec, int resolution) {
  const int m = resolution;
  std::vector<Component> out;
  out.reserve(spec.dimension());
  for (int r = 0; r < spec.dimension(); ++r) {
    GridTable g;
    g.m = m;
    g.values.resize(static_cast<std::size_t>(m) * m);
    std::vector<double> row_avg(m, 0.0), col_avg(m, 0.0);
    double grand = 0.0;
    for (int k = 0; k < m; ++k) {
      const double x = (k + 0.5) / m;
      for (int l = 0; l < m; ++l) {
        const double y = (l + 0.5) / m;
        const double v = spec.eval(r, x, y);
        g.values[static_cast<std::size_t>(k) * m + l] = v;
        row_avg[k] += v;
        col_avg[l] += v;
        grand += v;
      }
    }
    for (auto& v : row_avg) v /= m;
    for (auto& v : col_avg) v /= m;
    grand /= static_cast<double>(m) * m;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l)
        g.values[static_cast<std::size_t>(k) * m + l] += grand - row_avg[k] - col_avg[l];
    out.emplace_back(std::move(g));
  }
  return StatisticSpec(std::move(out), true);
}

double max_marginal_average(const StatisticSpec& spec, int resolution) {
  const int m = resolution;
  double worst = 0.0;
  for (int r = 0; r < spec.dimension(); ++r) {
    std::vector<double> row(m, 0.0), col(m, 0.0);
    for (int k = 0; k < m; ++k) {
      const double x = (k + 0.5) / m;
      for (int l = 0; l < m; ++l) {
        const double y = (l + 0.5) / m;
        const double v = spec.eval(r, x, y);
        row[k] += v;
        col[l] += v;
      }
    }
    for (double v : row) worst = std::max(worst, std::abs(v / m));
    for (double v : col) worst = std::max(worst, std::abs(v / m));
  }
  return worst;
}

Eigen::MatrixXd gram_matrix(const StatisticSpec& spec, int resolution) {
  const int L = spec.dimension();
  const int m = resolution;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(L, L);
  Eigen::VectorXd f(L);
  for (int k = 0; k < m; ++k) {
    const double x = (k + 0.5) / m;
    for (int l = 0; l < m; ++l) {
      const double y = (l + 0.5) / m;
      spec.eval_all(x, y, f.data());
      gram.noalias() += f * f.transpose();
    }
  }
  return gram / (static_cast<double>(m) * m);
}

double check_linear_independence(const StatisticSpec& spec, int resolution) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_matrix(spec, resolution));
  return es.eigenvalues().minCoeff();
}

void write_tabulated(std::ostream& out, const StatisticSpec& spec) {
  // Serialization always resolves components onto a common grid.
  int m = 0;
  for (int r = 0; r < spec.dimension(); ++r)
    if (const auto* g = std::get_if<GridTable>(&spec.component(r))) m = std::max(m, g->m);
  if (m == 0) m = 512;

  out.precision(17);
  out << m << ' ' << spec.dimension() << '\n';
  for (int k = 0; k < m; ++k) {
    const double x = (k + 0.5) / m;
    for (int l = 0; l < m; ++l) {
      const double y = (l + 0.5) / m;
      for (int r = 0; r < spec.dimension(); ++r) {
        if (r > 0) out << ' ';
        out << spec.eval(r, x, y);
      }
      out << '\n';
    }
  }
}

StatisticSpec read_tabulated(std::istream& in) {
  int m = 0, L = 0;
  if (!(in >> m >> L) || m < 2 || L < 1)
    throw Error(ErrorCode::io_error, "bad tabulated statistic header");
  std::vector<GridTable> tables(L);
  for (auto& t : tables) {
    t.m = m;
    t.values.resize(static_cast<std::size_t>(m) * m);
  }
  for (std::size_t cell = 0; cell < static_cast<std::size_t>(m) * m; ++cell) {
    for (int r = 0; r < L; ++r) {
      double v;
      if (!(in >> v))
        throw Error(ErrorCode::io_error, "truncated tabulated statistic");
      tables[r].values[cell] = v;
    }
  }
  std::vector<Component> comps;
  comps.reserve(L);
  for (auto& t : tables) comps.emplace_back(std::move(t));
  return StatisticSpec(std::move(comps), false);
}

StatisticSpec read_tabulated_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open statistic file: " + path);
  return read_tabulated(in);
}

void write_tabulated_file(const std::string& path, const StatisticSpec& spec) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write statistic file: " + path);
  write_tabulated(out, spec);
}

}  // namespace permexp
