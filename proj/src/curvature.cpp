#include "curvkit/curvature.hpp"

#include <stdexcept>

#include "curvkit/operators.hpp"

namespace curvkit {

namespace {

std::vector<Differentiator> coordinate_derivatives(const Chart& chart) {
  std::vector<Differentiator> d;
  for (int i = 0; i < chart.dim(); ++i) d.emplace_back(chart.coordinates[i], i);
  return d;
}

// (A B)_ab = sum_c A_ac B_cb for rank-2 tensors, skipping literal zeros.
SymbolicTensor matmul(const SymbolicTensor& A, const SymbolicTensor& B) {
  const int n = A.dim();
  SymbolicTensor out(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Expr v;
      for (int c = 0; c < n; ++c) {
        if (A(a, c).is_zero() || B(c, b).is_zero()) continue;
        v += A(a, c) * B(c, b);
      }
      out(a, b) = v;
    }
  return out;
}

// Symmetric product S_ac J^c_b, computed on a <= b and mirrored.
SymbolicTensor symmetric_power_step(const SymbolicTensor& prev, const SymbolicTensor& J) {
  const int n = prev.dim();
  SymbolicTensor out(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Expr v;
      for (int c = 0; c < n; ++c) {
        if (prev(a, c).is_zero() || J(c, b).is_zero()) continue;
        v += prev(a, c) * J(c, b);
      }
      out(a, b) = v;
      out(b, a) = v;
    }
  return out;
}

}  // namespace

Connection christoffel(const MetricSpec& m, const SymbolicTensor& ginv) {
  const int n = m.dim();
  auto d = coordinate_derivatives(m.chart);
  // dg(c, a, b) = d_c g_ab
  SymbolicTensor dg(n, 3);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        dg(c, a, b) = d[c](m.g(a, b));
        dg(c, b, a) = dg(c, a, b);
      }
  Connection conn{SymbolicTensor(n, 3)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        Expr v;
        for (int e = 0; e < n; ++e) {
          if (ginv(a, e).is_zero()) continue;
          Expr s = dg(b, e, c) + dg(c, b, e) - dg(e, b, c);
          if (s.is_zero()) continue;
          v += ginv(a, e) * s;
        }
        v = v / 2.0;
        conn.gamma(a, b, c) = v;
        conn.gamma(a, c, b) = v;
      }
  return conn;
}

SymbolicTensor riemann(const MetricSpec& m, const Connection& conn) {
  const int n = m.dim();
  const SymbolicTensor& G = conn.gamma;
  auto d = coordinate_derivatives(m.chart);
  // dG(c, e, b, x) = d_c Gamma^e_bx
  SymbolicTensor dG(n, 4);
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e)
      for (int b = 0; b < n; ++b)
        for (int x = b; x < n; ++x) {
          dG(c, e, b, x) = d[c](G(e, b, x));
          dG(c, e, x, b) = dG(c, e, b, x);
        }
  // Mixed tensor R^e_bcd, then lowered with g.
  auto mixed = [&](int e, int b, int c, int dd) {
    Expr v = dG(c, e, b, dd) - dG(dd, e, b, c);
    for (int f = 0; f < n; ++f) {
      if (!G(f, b, dd).is_zero() && !G(e, f, c).is_zero()) v += G(f, b, dd) * G(e, f, c);
      if (!G(f, b, c).is_zero() && !G(e, f, dd).is_zero()) v -= G(f, b, c) * G(e, f, dd);
    }
    return v;
  };
  SymbolicTensor R(n, 4);
  for_each_riemann_canonical(n, [&](int a, int b, int c, int dd) {
    Expr v;
    for (int e = 0; e < n; ++e) {
      if (m.g(a, e).is_zero()) continue;
      Expr r = mixed(e, b, c, dd);
      if (!r.is_zero()) v += m.g(a, e) * r;
    }
    set_riemann(R, a, b, c, dd, v);
  });
  return R;
}

RicciFamily ricci_family(const SymbolicTensor& g, const SymbolicTensor& ginv, const SymbolicTensor& R) {
  const int n = g.dim();
  RicciFamily out;
  out.S = SymbolicTensor(n, 2);
  for (int a = 0; a < n; ++a)
    for (int dd = a; dd < n; ++dd) {
      Expr v;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          if (ginv(b, c).is_zero() || R(a, b, c, dd).is_zero()) continue;
          v += ginv(b, c) * R(a, b, c, dd);
        }
      out.S(a, dd) = v;
      out.S(dd, a) = v;
    }
  out.J = matmul(ginv, out.S);
  out.S2 = symmetric_power_step(out.S, out.J);
  out.S3 = symmetric_power_step(out.S2, out.J);
  out.S4 = symmetric_power_step(out.S3, out.J);
  Expr kappa;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (ginv(a, b).is_zero() || out.S(a, b).is_zero()) continue;
      kappa += ginv(a, b) * out.S(a, b);
    }
  out.kappa = kappa;
  return out;
}

DerivedTensors derived_tensors(const SymbolicTensor& g, const RicciFamily& ricci, const SymbolicTensor& R) {
  const int n = g.dim();
  if (n < 3) throw std::invalid_argument("derived curvature tensors need dimension >= 3");
  const double nd = n;
  const SymbolicTensor gS = kulkarni_nomizu(g, ricci.S);
  DerivedTensors out;
  out.G = 0.5 * kulkarni_nomizu(g, g);
  out.K = R - (1.0 / (nd - 2.0)) * gS;
  // C vanishes identically in dimension 3; keep it exact instead of
  // leaving uncancelled terms.
  out.C = n == 3 ? SymbolicTensor(n, 4) : out.K + (ricci.kappa / ((nd - 1.0) * (nd - 2.0))) * out.G;
  out.W = R - (ricci.kappa / (nd * (nd - 1.0))) * out.G;
  out.P = SymbolicTensor(n, 4);
  for_each_index(n, 4, [&](const MultiIndex& i, std::size_t flat) {
    const int a = i[0], b = i[1], c = i[2], d = i[3];
    Expr corr = g(a, d) * ricci.S(b, c) - g(b, d) * ricci.S(a, c);
    out.P[flat] = R[flat] - corr / (nd - 1.0);
  });
  return out;
}

SymbolicTensor covariant_derivative(const SymbolicTensor& T, const Connection& conn, const Chart& chart,
                                    Symmetry symmetry) {
  const int n = T.dim();
  const int k = T.rank();
  auto d = coordinate_derivatives(chart);
  const SymbolicTensor& G = conn.gamma;
  SymbolicTensor out(n, k + 1);

  auto component = [&](const MultiIndex& idx, std::size_t flat, int e) {
    Expr v = d[e](T[flat]);
    for (int i = 0; i < k; ++i) {
      const std::size_t stride = T.stride(i);
      const std::size_t base = flat - static_cast<std::size_t>(idx[i]) * stride;
      for (int s = 0; s < n; ++s) {
        const Expr& gam = G(s, e, idx[i]);
        const Expr& t = T[base + s * stride];
        if (gam.is_zero() || t.is_zero()) continue;
        v -= gam * t;
      }
    }
    return v;
  };

  auto canonical = [&](const MultiIndex& idx) {
    switch (symmetry) {
      case Symmetry::symmetric: return k == 2 && idx[0] <= idx[1];
      case Symmetry::antisymmetric: return k == 2 && idx[0] < idx[1];
      case Symmetry::riemann: {
        if (k != 4) return true;
        const int a = idx[0], b = idx[1], c = idx[2], dd = idx[3];
        return a < b && c < dd && (a < c || (a == c && b <= dd));
      }
      case Symmetry::none: return true;
    }
    return true;
  };

  for_each_index(n, k, [&](const MultiIndex& idx, std::size_t flat) {
    if (!canonical(idx)) return;
    for (int e = 0; e < n; ++e) {
      Expr v = component(idx, flat, e);
      switch (symmetry) {
        case Symmetry::symmetric:
          if (k == 2) {
            out(idx[0], idx[1], e) = v;
            out(idx[1], idx[0], e) = v;
            continue;
          }
          break;
        case Symmetry::antisymmetric:
          if (k == 2) {
            out(idx[0], idx[1], e) = v;
            out(idx[1], idx[0], e) = -v;
            continue;
          }
          break;
        case Symmetry::riemann:
          if (k == 4) {
            const int a = idx[0], b = idx[1], c = idx[2], dd = idx[3];
            const Expr m = -v;
            out(a, b, c, dd, e) = v;
            out(b, a, c, dd, e) = m;
            out(a, b, dd, c, e) = m;
            out(b, a, dd, c, e) = v;
            out(c, dd, a, b, e) = v;
            out(dd, c, a, b, e) = m;
            out(c, dd, b, a, e) = m;
            out(dd, c, b, a, e) = v;
            continue;
          }
          break;
        case Symmetry::none: break;
      }
      out[flat * n + e] = v;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

Geometry::Geometry(MetricSpec metric) : metric_(std::move(metric)) {
  if (metric_.dim() < 3) throw std::invalid_argument("curvature pipeline needs dimension >= 3");
  ginv_ = inverse_metric(metric_);
  conn_ = christoffel(metric_, ginv_);
  R_ = riemann(metric_, conn_);
  ricci_ = ricci_family(metric_.g, ginv_, R_);
  derived_ = derived_tensors(metric_.g, ricci_, R_);
}

void Geometry::add_field(const std::string& name, SymbolicTensor t, Symmetry symmetry) {
  if (t.dim() != dim()) throw std::invalid_argument("field '" + name + "' has the wrong dimension");
  extra_[name] = {std::move(t), symmetry};
}

const SymbolicTensor& Geometry::field(std::string_view name) const {
  if (name == "g") return metric_.g;
  if (name == "ginv") return ginv_;
  if (name == "Gamma") return conn_.gamma;
  if (name == "R") return R_;
  if (name == "S") return ricci_.S;
  if (name == "S2") return ricci_.S2;
  if (name == "S3") return ricci_.S3;
  if (name == "S4") return ricci_.S4;
  if (name == "J") return ricci_.J;
  if (name == "C") return derived_.C;
  if (name == "P") return derived_.P;
  if (name == "W") return derived_.W;
  if (name == "K") return derived_.K;
  if (name == "G") return derived_.G;
  if (auto it = extra_.find(name); it != extra_.end()) return it->second.first;
  throw std::out_of_range("unknown field '" + std::string(name) + "'");
}

bool Geometry::has_field(std::string_view name) const {
  try {
    field(name);
    return true;
  } catch (const std::out_of_range&) {
    return false;
  }
}

Symmetry Geometry::symmetry_of(std::string_view name) const {
  if (name == "g" || name == "ginv" || name == "S" || name == "S2" || name == "S3" || name == "S4") {
    return Symmetry::symmetric;
  }
  if (name == "R" || name == "C" || name == "W" || name == "K" || name == "G") return Symmetry::riemann;
  if (auto it = extra_.find(name); it != extra_.end()) return it->second.second;
  return Symmetry::none;
}

std::vector<std::string> Geometry::field_names() const {
  std::vector<std::string> names{"g", "ginv", "Gamma", "R", "S", "S2", "S3", "S4", "J", "C", "P", "W", "K", "G"};
  for (const auto& [name, f] : extra_) names.push_back(name);
  return names;
}

const SymbolicTensor& Geometry::nabla(std::string_view name) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = nabla_.find(name); it != nabla_.end()) return *it->second;
  auto t = std::make_unique<SymbolicTensor>(
      covariant_derivative(field(name), conn_, metric_.chart, symmetry_of(name)));
  auto [it, inserted] = nabla_.emplace(std::string(name), std::move(t));
  return *it->second;
}

}  // namespace curvkit
