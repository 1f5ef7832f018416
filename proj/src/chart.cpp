#include "curvkit/chart.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace curvkit {

int Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coordinates.size(); ++i) {
    if (coordinates[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string to_string(const Signature& s) {
  return "(" + std::to_string(s.negative) + "," + std::to_string(s.positive) + ")";
}

bool DomainPredicate::holds(Evaluator& ev) const {
  const double l = ev(lhs);
  const double r = ev(rhs);
  switch (relation) {
    case Relation::greater: return l > r;
    case Relation::greater_equal: return l >= r;
    case Relation::less: return l < r;
    case Relation::less_equal: return l <= r;
    case Relation::not_equal: return l != r;
  }
  return false;
}

std::string to_string(const DomainPredicate& p) {
  const char* op = ">";
  switch (p.relation) {
    case Relation::greater: op = ">"; break;
    case Relation::greater_equal: op = ">="; break;
    case Relation::less: op = "<"; break;
    case Relation::less_equal: op = "<="; break;
    case Relation::not_equal: op = "!="; break;
  }
  return to_string(p.lhs) + " " + op + " " + to_string(p.rhs);
}

MetricSpec::MetricSpec(std::string name_, Chart chart_, Signature signature_, ParamEnv parameters_)
    : name(std::move(name_)),
      chart(std::move(chart_)),
      g(chart.dim(), 2),
      signature(signature_),
      parameters(std::move(parameters_)),
      samples(chart.dim()) {
  if (chart.dim() < 3) throw std::invalid_argument("a chart needs at least three coordinates");
  for (std::size_t i = 0; i < chart.coordinates.size(); ++i) {
    for (std::size_t j = i + 1; j < chart.coordinates.size(); ++j) {
      if (chart.coordinates[i] == chart.coordinates[j]) {
        throw std::invalid_argument("duplicate coordinate name '" + chart.coordinates[i] + "'");
      }
    }
  }
  if (signature.negative + signature.positive != chart.dim()) {
    throw std::invalid_argument("signature " + to_string(signature) + " does not match dimension " +
                                std::to_string(chart.dim()));
  }
}

void MetricSpec::set_component(int a, int b, const Expr& e) {
  g(a, b) = e;
  g(b, a) = e;
}

SymbolTable MetricSpec::symbols() const {
  SymbolTable t;
  t.coordinates = chart.coordinates;
  for (const auto& [name, value] : parameters) t.parameters.push_back(name);
  return t;
}

ParamEnv MetricSpec::bind(const ParamEnv& overrides) const {
  ParamEnv out = parameters;
  for (const auto& [k, v] : overrides) out[k] = v;
  return out;
}

namespace {

bool is_diagonal(const SymbolicTensor& g) {
  for (int a = 0; a < g.dim(); ++a)
    for (int b = 0; b < g.dim(); ++b)
      if (a != b && !g(a, b).is_zero()) return false;
  return true;
}

// Laplace expansion along the first row; rows/cols select a square minor.
Expr determinant(const SymbolicTensor& g, std::vector<int> rows, std::vector<int> cols) {
  if (rows.size() == 1) return g(rows[0], cols[0]);
  Expr det;
  const int r0 = rows[0];
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (g(r0, cols[j]).is_zero()) continue;
    std::vector<int> sub_cols;
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (k != j) sub_cols.push_back(cols[k]);
    Expr term = g(r0, cols[j]) * determinant(g, sub_rows, sub_cols);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

}  // namespace

SymbolicTensor inverse_metric(const MetricSpec& m) {
  const int n = m.dim();
  SymbolicTensor inv(n, 2);
  if (is_diagonal(m.g)) {
    for (int a = 0; a < n; ++a) {
      if (simplify(m.g(a, a)).is_zero()) {
        throw DegenerateMetricError("metric component g_" + std::to_string(a + 1) + std::to_string(a + 1) +
                                    " is identically zero");
      }
      inv(a, a) = Expr(1.0) / m.g(a, a);
    }
    return inv;
  }
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const Expr det = determinant(m.g, all, all);
  if (simplify(det).is_zero()) throw DegenerateMetricError("metric determinant is identically zero");
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      // inverse(a,b) = cofactor(b,a) / det
      std::vector<int> rows, cols;
      for (int i = 0; i < n; ++i) {
        if (i != b) rows.push_back(i);
        if (i != a) cols.push_back(i);
      }
      Expr minor = n == 1 ? Expr(1.0) : determinant(m.g, rows, cols);
      Expr cof = ((a + b) % 2 == 0) ? minor : -minor;
      inv(a, b) = cof / det;
      inv(b, a) = inv(a, b);
    }
  }
  return inv;
}

double degeneracy_threshold(double max_norm, int n) { return 1e-10 * std::pow(max_norm, n); }

NumericTensor metric_at(const MetricSpec& m, std::span<const double> point, const ParamEnv& params) {
  Evaluator ev(std::vector<double>(point.begin(), point.end()), params);
  return evaluate(m.g, ev);
}

namespace {

std::string format_point(const MetricSpec& m, std::span<const double> point) {
  std::ostringstream os;
  for (int i = 0; i < m.dim(); ++i) {
    if (i) os << ", ";
    os << m.chart.coordinates[i] << "=" << point[i];
  }
  return os.str();
}

}  // namespace

Signature signature_at(const MetricSpec& m, std::span<const double> point, const ParamEnv& params) {
  const NumericTensor gt = metric_at(m, point, params);
  const Eigen::MatrixXd g = as_matrix(gt);
  const double scale = g.cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double cutoff = 1e-10 * scale;
  Signature s;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (std::fabs(lambda) <= cutoff || scale == 0.0) {
      throw DegenerateMetricError("metric is degenerate at " + format_point(m, point));
    }
    (lambda < 0 ? s.negative : s.positive) += 1;
  }
  return s;
}

bool admissible(const MetricSpec& m, std::span<const double> point, const ParamEnv& params) {
  Evaluator ev(std::vector<double>(point.begin(), point.end()), params);
  try {
    for (const auto& p : m.domain)
      if (!p.holds(ev)) return false;
    for (const auto& locus : m.exceptional)
      if (std::fabs(ev(locus)) <= kLocusTolerance) return false;
    for (std::size_t i = 0; i < m.g.size(); ++i) ev(m.g[i]);
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

namespace {

std::vector<std::vector<double>> cartesian(const std::vector<std::vector<double>>& axes) {
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out) {
      for (double v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Platform-independent uniform draw in [lo, hi).
double draw(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

SampleGrid default_grid(const MetricSpec& m, const ParamEnv& params, Tolerance tol) {
  SampleGrid grid;
  grid.params = params;
  grid.tol = tol;
  const int n = m.dim();
  bool all_declared = true;
  for (int i = 0; i < n; ++i) all_declared = all_declared && i < static_cast<int>(m.samples.size()) && !m.samples[i].empty();

  if (all_declared) {
    for (auto& p : cartesian(m.samples))
      if (admissible(m, p, params)) grid.points.push_back(std::move(p));
    grid.description = "declared sample values";
  } else {
    std::mt19937_64 rng(kGridSeed);
    const std::size_t max_attempts = 4096;
    for (std::size_t k = 0; k < max_attempts && grid.points.size() < kMinGridPoints; ++k) {
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) {
        const auto& declared = i < static_cast<int>(m.samples.size()) ? m.samples[i] : std::vector<double>{};
        p[i] = declared.empty() ? draw(rng, 0.25, 4.0) : declared[k % declared.size()];
      }
      if (admissible(m, p, params)) grid.points.push_back(std::move(p));
    }
    grid.description = "seeded random sample (seed " + std::to_string(kGridSeed) + ")";
  }
  if (grid.points.empty()) throw EmptyGridError("no admissible sample point for metric '" + m.name + "'");
  return grid;
}

SampleGrid make_grid(const MetricSpec& m, const ParamEnv& params, const std::vector<GridAxis>& axes, Tolerance tol) {
  const int n = m.dim();
  std::vector<std::vector<double>> values(n);
  for (int i = 0; i < n; ++i) {
    const bool declared = i < static_cast<int>(m.samples.size()) && !m.samples[i].empty();
    values[i] = {declared ? m.samples[i].front() : 1.0};
  }
  std::ostringstream desc;
  for (const auto& axis : axes) {
    const int i = m.chart.index_of(axis.coordinate);
    if (i < 0) throw std::invalid_argument("grid names unknown coordinate '" + axis.coordinate + "'");
    if (axis.values.empty()) throw std::invalid_argument("grid axis '" + axis.coordinate + "' has no values");
    values[i] = axis.values;
    desc << (desc.tellp() > 0 ? "; " : "") << axis.coordinate << " x" << axis.values.size();
  }
  SampleGrid grid;
  grid.params = params;
  grid.tol = tol;
  std::size_t dropped = 0;
  for (auto& p : cartesian(values)) {
    if (admissible(m, p, params)) {
      grid.points.push_back(std::move(p));
    } else {
      ++dropped;
    }
  }
  if (grid.points.empty()) {
    throw EmptyGridError("every requested grid point lies outside the domain or on an exceptional locus");
  }
  grid.description = "requested axes (" + desc.str() + ")";
  if (dropped) grid.description += ", " + std::to_string(dropped) + " inadmissible points dropped";
  return grid;
}

void validate_grid(const MetricSpec& m, const SampleGrid& grid) {
  const int n = m.dim();
  for (const auto& p : grid.points) {
    const NumericTensor gt = metric_at(m, p, grid.params);
    const Eigen::MatrixXd g = as_matrix(gt);
    const double scale = g.cwiseAbs().maxCoeff();
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
      throw DegenerateMetricError("metric is not symmetric at " + format_point(m, p));
    }
    if (std::fabs(g.determinant()) <= degeneracy_threshold(scale, n)) {
      throw DegenerateMetricError("metric is degenerate at " + format_point(m, p));
    }
    const Signature s = signature_at(m, p, grid.params);
    if (!(s == m.signature)) {
      throw DegenerateMetricError("signature " + to_string(s) + " at " + format_point(m, p) +
                                  " differs from declared " + to_string(m.signature));
    }
  }
}

}  // namespace curvkit
