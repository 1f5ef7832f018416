// Dense covariant tensors over an n-dimensional chart.
//
// Components are stored row-major with every index running over 0..n-1; the
// first index varies slowest. Scalar is either Expr (symbolic fields) or
// double (a field sampled at one point).
#ifndef CURVKIT_TENSOR_HPP
#define CURVKIT_TENSOR_HPP

#include <Eigen/Core>

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "curvkit/expr.hpp"

namespace curvkit {

enum class Symmetry {
  none,
  symmetric,      // (0,2), T_ab = T_ba
  antisymmetric,  // (0,2), T_ab = -T_ba
  riemann,        // (0,4), pair antisymmetry and pair exchange
};

inline constexpr int kMaxRank = 8;
using MultiIndex = std::array<int, kMaxRank>;

template <class Scalar>
class Tensor {
 public:
  using value_type = Scalar;

  Tensor() = default;
  Tensor(int dim, int rank) : dim_(dim), rank_(rank), data_(component_count(dim, rank), Scalar(0.0)) {
    if (rank < 0 || rank > kMaxRank) throw std::invalid_argument("tensor rank out of range");
  }

  static std::size_t component_count(int dim, int rank) {
    std::size_t c = 1;
    for (int i = 0; i < rank; ++i) c *= static_cast<std::size_t>(dim);
    return c;
  }

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  template <class... I>
  Scalar& operator()(I... idx) {
    return data_[offset_of(idx...)];
  }
  template <class... I>
  const Scalar& operator()(I... idx) const {
    return data_[offset_of(idx...)];
  }

  Scalar& operator[](std::size_t flat) { return data_[flat]; }
  const Scalar& operator[](std::size_t flat) const { return data_[flat]; }

  Scalar& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const Scalar& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  std::size_t offset(std::span<const int> idx) const {
    assert(static_cast<int>(idx.size()) >= rank_);
    std::size_t off = 0;
    for (int i = 0; i < rank_; ++i) off = off * dim_ + idx[i];
    return off;
  }

  /// Inverse of offset(): writes rank() indices into out.
  void unflatten(std::size_t flat, MultiIndex& out) const {
    for (int i = rank_ - 1; i >= 0; --i) {
      out[i] = static_cast<int>(flat % dim_);
      flat /= dim_;
    }
  }

  /// Distance in flat storage between consecutive values of index `slot`.
  std::size_t stride(int slot) const { return component_count(dim_, rank_ - 1 - slot); }

  const std::vector<Scalar>& data() const { return data_; }
  std::vector<Scalar>& data() { return data_; }

 private:
  template <class... I>
  std::size_t offset_of(I... idx) const {
    assert(static_cast<int>(sizeof...(I)) == rank_);
    std::size_t off = 0;
    ((off = off * dim_ + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int dim_ = 0;
  int rank_ = 0;
  std::vector<Scalar> data_;
};

using SymbolicTensor = Tensor<Expr>;
using NumericTensor = Tensor<double>;

// ---------------------------------------------------------------------------
// Index iteration

template <class F>
void for_each_index(int dim, int rank, F&& f) {
  MultiIndex idx{};
  const std::size_t total = Tensor<double>::component_count(dim, rank);
  for (std::size_t flat = 0; flat < total; ++flat) {
    f(static_cast<const MultiIndex&>(idx), flat);
    for (int i = rank - 1; i >= 0; --i) {
      if (++idx[i] < dim) break;
      idx[i] = 0;
    }
  }
}

/// Calls f(a,b,c,d) once per independent Riemann-like component:
/// a<b, c<d and (a,b) <= (c,d) lexicographically.
template <class F>
void for_each_riemann_canonical(int dim, F&& f) {
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b)
      for (int c = a; c < dim; ++c)
        for (int d = c + 1; d < dim; ++d) {
          if (c == a && d < b) continue;
          f(a, b, c, d);
        }
}

/// Writes v at (a,b,c,d) and every slot implied by the Riemann symmetries.
template <class Scalar>
void set_riemann(Tensor<Scalar>& t, int a, int b, int c, int d, const Scalar& v) {
  const Scalar m = -v;
  t(a, b, c, d) = v;
  t(b, a, c, d) = m;
  t(a, b, d, c) = m;
  t(b, a, d, c) = v;
  t(c, d, a, b) = v;
  t(d, c, a, b) = m;
  t(c, d, b, a) = m;
  t(d, c, b, a) = v;
}

// ---------------------------------------------------------------------------
// Componentwise arithmetic

template <class S>
Tensor<S> operator+(Tensor<S> a, const Tensor<S>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("tensor shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] + b[i];
  return a;
}

template <class S>
Tensor<S> operator-(Tensor<S> a, const Tensor<S>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("tensor shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] - b[i];
  return a;
}

template <class S>
Tensor<S> operator-(Tensor<S> a) {
  for (auto& x : a.data()) x = -x;
  return a;
}

template <class S>
Tensor<S> operator*(const std::type_identity_t<S>& s, Tensor<S> a) {
  for (auto& x : a.data()) x = s * x;
  return a;
}

template <class S>
Tensor<S> operator*(Tensor<S> a, const std::type_identity_t<S>& s) {
  for (auto& x : a.data()) x = x * s;
  return a;
}

// ---------------------------------------------------------------------------
// Numeric views

inline Eigen::Map<const Eigen::VectorXd> as_vector(const NumericTensor& t) {
  return {t.data().data(), static_cast<Eigen::Index>(t.size())};
}

inline Eigen::Map<Eigen::VectorXd> as_vector(NumericTensor& t) {
  return {t.data().data(), static_cast<Eigen::Index>(t.size())};
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMajorMatrix> as_matrix(const NumericTensor& t) {
  if (t.rank() != 2) throw std::invalid_argument("as_matrix needs a rank-2 tensor");
  return {t.data().data(), t.dim(), t.dim()};
}

inline NumericTensor from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  NumericTensor t(static_cast<int>(m.rows()), 2);
  for (int a = 0; a < m.rows(); ++a)
    for (int b = 0; b < m.cols(); ++b) t(a, b) = m(a, b);
  return t;
}

inline double max_abs(const NumericTensor& t) {
  return t.empty() ? 0.0 : as_vector(t).cwiseAbs().maxCoeff();
}

inline double norm(const NumericTensor& t) { return as_vector(t).norm(); }

inline NumericTensor evaluate(const SymbolicTensor& t, Evaluator& ev) {
  NumericTensor out(t.dim(), t.rank());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = ev(t[i]);
  return out;
}

}  // namespace curvkit

#endif  // CURVKIT_TENSOR_HPP
