// Coordinate charts, metric specifications and sample grids.
#ifndef CURVKIT_CHART_HPP
#define CURVKIT_CHART_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "curvkit/expr.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit {

struct Chart {
  std::vector<std::string> coordinates;

  int dim() const { return static_cast<int>(coordinates.size()); }
  /// 0-based position of a coordinate, or -1.
  int index_of(std::string_view name) const;
};

/// (negative, positive) eigenvalue counts.
struct Signature {
  int negative = 0;
  int positive = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

std::string to_string(const Signature& s);

enum class Relation { greater, greater_equal, less, less_equal, not_equal };

struct DomainPredicate {
  Expr lhs;
  Relation relation = Relation::greater;
  Expr rhs;
  bool holds(Evaluator& ev) const;
};

std::string to_string(const DomainPredicate& p);

struct Tolerance {
  double rel = 1e-8;
  double abs_floor = 1e-12;
};

class DegenerateMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MetricSpec {
  std::string name;
  Chart chart;
  SymbolicTensor g;  // rank 2, symmetric by construction through set_component
  Signature signature;
  ParamEnv parameters;  // declared parameters with default values
  std::vector<DomainPredicate> domain;
  std::vector<Expr> exceptional;  // loci where these vanish are never sampled
  /// Optional declared sample values per coordinate (empty = none declared).
  std::vector<std::vector<double>> samples;

  MetricSpec() = default;
  MetricSpec(std::string name, Chart chart, Signature signature, ParamEnv parameters = {});

  int dim() const { return chart.dim(); }
  /// Sets g_ab and g_ba (0-based indices).
  void set_component(int a, int b, const Expr& e);
  /// Coordinates and parameter names, for parsing expressions over this chart.
  SymbolTable symbols() const;
  /// Declared defaults overridden by `overrides`.
  ParamEnv bind(const ParamEnv& overrides) const;
};

/// Symbolic inverse: diagonal shortcut, otherwise adjugate over determinant.
SymbolicTensor inverse_metric(const MetricSpec& m);

/// |det| and |eigenvalue| cutoff for a matrix with the given max-norm.
double degeneracy_threshold(double max_norm, int n);

NumericTensor metric_at(const MetricSpec& m, std::span<const double> point, const ParamEnv& params);

/// Eigenvalue sign counts at a point; throws DegenerateMetricError when an
/// eigenvalue falls inside the degeneracy threshold.
Signature signature_at(const MetricSpec& m, std::span<const double> point, const ParamEnv& params);

struct SampleGrid {
  std::vector<std::vector<double>> points;
  ParamEnv params;
  Tolerance tol;
  std::string description;
};

struct GridAxis {
  std::string coordinate;
  std::vector<double> values;
};

/// Seed for the random part of default grids.
inline constexpr std::uint64_t kGridSeed = 0x6d656c76696eULL;
inline constexpr std::size_t kMinGridPoints = 8;
/// A point lies on an exceptional locus when |expr| <= this.
inline constexpr double kLocusTolerance = 1e-9;

/// True when the point satisfies the domain, avoids every exceptional locus
/// and the metric evaluates to finite numbers there.
bool admissible(const MetricSpec& m, std::span<const double> point, const ParamEnv& params);

/// Cartesian product of declared sample values; coordinates without declared
/// values are drawn from a seeded generator in [0.25, 4]. Throws EmptyGridError.
SampleGrid default_grid(const MetricSpec& m, const ParamEnv& params, Tolerance tol = {});

/// Cartesian product of the requested axes. Unlisted coordinates take their
/// first declared sample value, or 1. Inadmissible points are dropped;
/// throws EmptyGridError when nothing is left.
SampleGrid make_grid(const MetricSpec& m, const ParamEnv& params, const std::vector<GridAxis>& axes,
                     Tolerance tol = {});

/// Symmetry, invertibility and declared signature at every grid point.
void validate_grid(const MetricSpec& m, const SampleGrid& grid);

}  // namespace curvkit

#endif  // CURVKIT_CHART_HPP
