// Algebraic curvature operators: Kulkarni-Nomizu product, the derivation
// action A.T of a curvature-like tensor, and the Tachibana operator Q(B,T).
//
// All three are templates over the component scalar, so the same code runs
// on symbolic fields (Tensor<Expr>) and on fields sampled at a point
// (Tensor<double>). Outputs of A.T and Q(B,T) append the pair (alpha, beta)
// as the last two indices and are antisymmetric in it by construction.
#ifndef CURVKIT_OPERATORS_HPP
#define CURVKIT_OPERATORS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curvkit/tensor.hpp"

namespace curvkit {

namespace detail {

inline bool symmetric_entry(const Expr& a, const Expr& b) { return structurally_equal(a, b); }
inline bool symmetric_entry(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool is_zero(const Expr& e) { return e.is_zero(); }
inline bool is_zero(double v) { return v == 0.0; }

template <class S>
void check_valence(const Tensor<S>& t, int rank, const char* what) {
  if (t.rank() != rank) throw std::invalid_argument(std::string(what) + ": expected rank " + std::to_string(rank));
}

template <class S>
void check_operand(const Tensor<S>& t, const char* what) {
  if (t.rank() < 1 || t.rank() + 2 > kMaxRank) throw std::invalid_argument(std::string(what) + ": unsupported valence");
}

}  // namespace detail

template <class S>
bool is_symmetric(const Tensor<S>& t) {
  if (t.rank() != 2) return false;
  for (int a = 0; a < t.dim(); ++a)
    for (int b = a + 1; b < t.dim(); ++b)
      if (!detail::symmetric_entry(t(a, b), t(b, a))) return false;
  return true;
}

/// (E^F)_abcd = E_ad F_bc - E_ac F_bd + E_bc F_ad - E_bd F_ac for symmetric E, F.
template <class S>
Tensor<S> kulkarni_nomizu(const Tensor<S>& E, const Tensor<S>& F) {
  detail::check_valence(E, 2, "kulkarni_nomizu");
  detail::check_valence(F, 2, "kulkarni_nomizu");
  if (!is_symmetric(E) || !is_symmetric(F)) throw std::invalid_argument("kulkarni_nomizu: operands must be symmetric");
  const int n = E.dim();
  Tensor<S> out(n, 4);
  for_each_riemann_canonical(n, [&](int a, int b, int c, int d) {
    S v = E(a, d) * F(b, c) - E(a, c) * F(b, d) + E(b, c) * F(a, d) - E(b, d) * F(a, c);
    set_riemann(out, a, b, c, d, v);
  });
  return out;
}

/// (A.T)_{a1..ak alpha beta} = -g^{rs} sum_i A_{alpha beta a_i s} T_{a1..r..ak}.
/// A must be a (0,4) tensor; T any (0,k). ginv is the inverse metric.
template <class S>
Tensor<S> curvature_action(const Tensor<S>& A, const Tensor<S>& T, const Tensor<S>& ginv) {
  detail::check_valence(A, 4, "curvature_action");
  detail::check_valence(ginv, 2, "curvature_action");
  detail::check_operand(T, "curvature_action");
  const int n = A.dim();
  const int k = T.rank();

  // Araised(alpha, beta, a, r) = sum_s g^{rs} A_{alpha beta a s}
  Tensor<S> raised(n, 4);
  for (int al = 0; al < n; ++al)
    for (int be = al + 1; be < n; ++be)
      for (int a = 0; a < n; ++a)
        for (int r = 0; r < n; ++r) {
          S v(0.0);
          for (int s = 0; s < n; ++s) {
            if (detail::is_zero(ginv(r, s)) || detail::is_zero(A(al, be, a, s))) continue;
            v = v + ginv(r, s) * A(al, be, a, s);
          }
          raised(al, be, a, r) = v;
        }

  Tensor<S> out(n, k + 2);
  for_each_index(n, k, [&](const MultiIndex& idx, std::size_t flat) {
    for (int al = 0; al < n; ++al) {
      for (int be = al + 1; be < n; ++be) {
        S v(0.0);
        for (int i = 0; i < k; ++i) {
          const std::size_t stride = T.stride(i);
          const std::size_t base = flat - static_cast<std::size_t>(idx[i]) * stride;
          for (int r = 0; r < n; ++r) {
            const S& x = raised(al, be, idx[i], r);
            const S& t = T[base + r * stride];
            if (detail::is_zero(x) || detail::is_zero(t)) continue;
            v = v - x * t;
          }
        }
        const std::size_t o = flat * n * n;
        out[o + al * n + be] = v;
        out[o + be * n + al] = -v;
      }
    }
  });
  return out;
}

/// Q(B,T)_{a1..ak alpha beta} = sum_i B_{alpha a_i} T_{a1..beta..ak} - B_{beta a_i} T_{a1..alpha..ak},
/// the action of the endomorphism (alpha ^_B beta) on T.
template <class S>
Tensor<S> q_operator(const Tensor<S>& B, const Tensor<S>& T) {
  detail::check_valence(B, 2, "q_operator");
  detail::check_operand(T, "q_operator");
  if (!is_symmetric(B)) throw std::invalid_argument("q_operator: first operand must be symmetric");
  const int n = B.dim();
  const int k = T.rank();
  Tensor<S> out(n, k + 2);
  for_each_index(n, k, [&](const MultiIndex& idx, std::size_t flat) {
    for (int al = 0; al < n; ++al) {
      for (int be = al + 1; be < n; ++be) {
        S v(0.0);
        for (int i = 0; i < k; ++i) {
          const std::size_t stride = T.stride(i);
          const std::size_t base = flat - static_cast<std::size_t>(idx[i]) * stride;
          const S& b_al = B(al, idx[i]);
          const S& b_be = B(be, idx[i]);
          if (!detail::is_zero(b_al) && !detail::is_zero(T[base + be * stride])) v = v + b_al * T[base + be * stride];
          if (!detail::is_zero(b_be) && !detail::is_zero(T[base + al * stride])) v = v - b_be * T[base + al * stride];
        }
        const std::size_t o = flat * n * n;
        out[o + al * n + be] = v;
        out[o + be * n + al] = -v;
      }
    }
  });
  return out;
}

}  // namespace curvkit

#endif  // CURVKIT_OPERATORS_HPP
