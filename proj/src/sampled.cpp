#include "curvkit/sampled.hpp"

#include <stdexcept>

#include "curvkit/operators.hpp"

namespace curvkit {

const NumericTensor& PointGeometry::field(std::string_view name) const {
  auto it = fields.find(name);
  if (it == fields.end()) throw std::out_of_range("field '" + std::string(name) + "' was not sampled");
  return it->second;
}

NumericTensor named_tensor(const PointGeometry& p, std::string_view name) {
  if (name == "kappa") {
    NumericTensor k(p.g().dim(), 0);
    k[0] = p.kappa;
    return k;
  }
  if (p.has(name)) return p.field(name);
  if (const auto dot = name.find("dot"); dot != std::string_view::npos) {
    const auto A = name.substr(0, dot), T = name.substr(dot + 3);
    if (p.has(A) && p.has(T) && p.field(A).rank() == 4) return curvature_action(p.field(A), p.field(T), p.ginv());
  }
  if (name.size() > 2 && name.front() == 'Q') {
    for (std::size_t len = name.size() - 2; len >= 1; --len) {
      const auto B = name.substr(1, len), T = name.substr(1 + len);
      if (p.has(B) && p.has(T) && p.field(B).rank() == 2) return q_operator(p.field(B), p.field(T));
    }
  }
  if (name.size() >= 2 && name.back() == 'F' && p.has("F")) {
    const auto A = name.substr(0, name.size() - 1);
    if (p.has(A) && p.field(A).rank() == 4) return curvature_action(p.field(A), p.field("F"), p.ginv());
  }
  throw std::out_of_range("unknown tensor '" + std::string(name) + "'");
}

SampledGeometry::SampledGeometry(const Geometry& geometry, SampleGrid grid, const std::vector<std::string>& nabla_fields)
    : geometry_(&geometry), grid_(std::move(grid)) {
  for (const auto& name : nabla_fields) geometry.nabla(name);
  points_.reserve(grid_.points.size());
  for (const auto& p : grid_.points) {
    Evaluator ev(p, grid_.params);
    PointGeometry pg;
    pg.point = p;
    for (const auto& name : geometry.field_names()) pg.fields[name] = evaluate(geometry.field(name), ev);
    for (const auto& name : nabla_fields) pg.fields["nabla" + name] = evaluate(geometry.nabla(name), ev);
    pg.kappa = ev(geometry.ricci().kappa);
    points_.push_back(std::move(pg));
  }
}

}  // namespace curvkit
