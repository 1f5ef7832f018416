// Levi-Civita connection and curvature tensors of a metric, kept symbolic.
//
// Conventions (0-based in code, 1-based in every printed table):
//   Gamma(a,b,c) = Gamma^a_bc
//   R_abcd = g_ae (d_c Gamma^e_bd - d_d Gamma^e_bc + Gamma^f_bd Gamma^e_fc - Gamma^f_bc Gamma^e_fd)
//   S_ad   = g^bc R_abcd,  kappa = g^ab S_ab,  J^a_b = g^ac S_cb
//   S^j_ab = g_ac (J^{j-1})^c_b
//   T_{a1..ak,e} stores the derivative index last.
// With these signs R_1313 = e^{2f} f'^2 and S_22 = 2f'' for the base metrics.
#ifndef CURVKIT_CURVATURE_HPP
#define CURVKIT_CURVATURE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "curvkit/chart.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit {

struct Connection {
  SymbolicTensor gamma;  // (1,2) stored as rank 3, first index up
};

struct RicciFamily {
  SymbolicTensor S, S2, S3, S4;
  SymbolicTensor J;  // Ricci operator, J(a,b) = J^a_b
  Expr kappa;
};

struct DerivedTensors {
  SymbolicTensor C, P, W, K, G;
};

Connection christoffel(const MetricSpec& m, const SymbolicTensor& ginv);
SymbolicTensor riemann(const MetricSpec& m, const Connection& conn);
RicciFamily ricci_family(const SymbolicTensor& g, const SymbolicTensor& ginv, const SymbolicTensor& R);
DerivedTensors derived_tensors(const SymbolicTensor& g, const RicciFamily& ricci, const SymbolicTensor& R);

/// T_{a1..ak,e} = d_e T_{a1..ak} - sum_i Gamma^s_{e a_i} T_{a1..s..ak}.
/// The symmetry hint only limits which components are differentiated.
SymbolicTensor covariant_derivative(const SymbolicTensor& T, const Connection& conn, const Chart& chart,
                                    Symmetry symmetry = Symmetry::none);

/// The whole symbolic pipeline for one metric. Construction computes the
/// connection, Riemann tensor, Ricci family and derived tensors; covariant
/// derivatives are built on first request and cached.
class Geometry {
 public:
  explicit Geometry(MetricSpec metric);

  const MetricSpec& metric() const { return metric_; }
  int dim() const { return metric_.dim(); }
  const SymbolicTensor& g() const { return metric_.g; }
  const SymbolicTensor& ginv() const { return ginv_; }
  const Connection& connection() const { return conn_; }
  const SymbolicTensor& R() const { return R_; }
  const RicciFamily& ricci() const { return ricci_; }
  const DerivedTensors& derived() const { return derived_; }

  /// Registers an extra field such as a Maxwell tensor.
  void add_field(const std::string& name, SymbolicTensor t, Symmetry symmetry);

  /// g, ginv, Gamma, R, S, S2, S3, S4, J, C, P, W, K, G, or a registered extra.
  const SymbolicTensor& field(std::string_view name) const;
  bool has_field(std::string_view name) const;
  Symmetry symmetry_of(std::string_view name) const;
  std::vector<std::string> field_names() const;

  /// Covariant derivative of a named field (cached).
  const SymbolicTensor& nabla(std::string_view name) const;

 private:
  MetricSpec metric_;
  SymbolicTensor ginv_;
  Connection conn_;
  SymbolicTensor R_;
  RicciFamily ricci_;
  DerivedTensors derived_;
  std::map<std::string, std::pair<SymbolicTensor, Symmetry>, std::less<>> extra_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::unique_ptr<SymbolicTensor>, std::less<>> nabla_;
};

}  // namespace curvkit

#endif  // CURVKIT_CURVATURE_HPP
