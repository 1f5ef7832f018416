// Curvature fields evaluated at the points of a sample grid.
#ifndef CURVKIT_SAMPLED_HPP
#define CURVKIT_SAMPLED_HPP

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curvkit/curvature.hpp"

namespace curvkit {

struct PointGeometry {
  std::vector<double> point;
  double kappa = 0.0;
  /// Every symbolic field of the geometry, plus "nabla<name>" for each
  /// requested covariant derivative.
  std::map<std::string, NumericTensor, std::less<>> fields;

  const NumericTensor& field(std::string_view name) const;
  bool has(std::string_view name) const { return fields.find(name) != fields.end(); }
  const NumericTensor& g() const { return field("g"); }
  const NumericTensor& ginv() const { return field("ginv"); }
};

inline const std::vector<std::string>& default_nabla_fields() {
  static const std::vector<std::string> names{"R", "S", "C", "K", "W"};
  return names;
}

/// A sampled field or an operator product, by name:
///   any field of the point ("R", "nablaC", ...), "kappa" (rank 0),
///   "<A>dot<T>" for A.T, "Q<B><T>" for Q(B,T), and "<A>F" for A.F.
/// Throws std::out_of_range for unknown names.
NumericTensor named_tensor(const PointGeometry& p, std::string_view name);

class SampledGeometry {
 public:
  SampledGeometry(const Geometry& geometry, SampleGrid grid,
                  const std::vector<std::string>& nabla_fields = default_nabla_fields());

  const Geometry& geometry() const { return *geometry_; }
  const SampleGrid& grid() const { return grid_; }
  std::size_t size() const { return points_.size(); }
  const PointGeometry& operator[](std::size_t i) const { return points_[i]; }
  std::span<const PointGeometry> points() const { return points_; }

 private:
  const Geometry* geometry_;
  SampleGrid grid_;
  std::vector<PointGeometry> points_;
};

}  // namespace curvkit

#endif  // CURVKIT_SAMPLED_HPP
