#include "curvkit/classifier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "curvkit/operators.hpp"

namespace curvkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using RowDecoder = std::function<std::vector<int>(Eigen::Index)>;

Eigen::VectorXd flat(const NumericTensor& t) { return as_vector(t); }

void check_grid(std::size_t a, std::size_t b, const std::string& name) {
  if (a != b) throw std::invalid_argument(name + ": sampled inputs live on different grids");
}

std::vector<std::string> indexed(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

Eigen::Index argmax_abs(const Eigen::VectorXd& v) {
  Eigen::Index i = 0;
  if (v.size()) v.cwiseAbs().maxCoeff(&i);
  return i;
}

RowDecoder tensor_decoder(int dim, int rank) {
  return [dim, rank](Eigen::Index row) {
    MultiIndex idx{};
    std::vector<int> out;
    std::size_t r = static_cast<std::size_t>(row);
    for (int i = rank - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(r % dim);
      r /= dim;
    }
    out.assign(idx.begin(), idx.begin() + rank);
    return out;
  };
}

// Pass/fail of a quantity that must vanish, measured against `scale`.
PointFit identity_point(const Eigen::VectorXd& defect, double scale, bool inputs_vanish, const Tolerance& tol) {
  PointFit pf;
  if (inputs_vanish) {
    pf.verdict = Verdict::vacuous;
    return pf;
  }
  const double d = defect.norm();
  pf.worst_row = argmax_abs(defect);
  if (d <= tol.abs_floor) {
    pf.verdict = Verdict::holds;
    pf.residual = scale > 0.0 ? d / scale : 0.0;
    return pf;
  }
  pf.residual = scale > 0.0 ? d / scale : std::numeric_limits<double>::infinity();
  pf.verdict = pf.residual <= tol.rel ? Verdict::holds : Verdict::fails;
  return pf;
}

FitResult aggregate_decoded(std::string name, std::vector<std::string> names, const std::vector<PointFit>& fits,
                            const RowDecoder& decode) {
  FitResult out;
  out.name = std::move(name);
  out.coefficient_names = std::move(names);
  bool any_fail = false, any_na = false, all_vacuous = true;
  double worst = -1.0;
  for (std::size_t p = 0; p < fits.size(); ++p) {
    const PointFit& f = fits[p];
    Eigen::VectorXd c = f.coefficients;
    if (c.size() != static_cast<Eigen::Index>(out.coefficient_names.size())) {
      c = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(out.coefficient_names.size()), kNaN);
    }
    if (f.verdict == Verdict::vacuous || f.verdict == Verdict::not_applicable) c.setConstant(kNaN);
    out.coefficients.push_back(c);
    out.residuals.push_back(f.residual);
    out.point_verdicts.push_back(f.verdict);
    out.nullspace_dim = std::max(out.nullspace_dim, f.nullspace_dim);
    any_fail = any_fail || f.verdict == Verdict::fails;
    any_na = any_na || f.verdict == Verdict::not_applicable;
    all_vacuous = all_vacuous && f.verdict == Verdict::vacuous;
    // Failing points take precedence as witnesses.
    const double key = f.residual + (f.verdict == Verdict::fails ? 1e300 : 0.0);
    if (key > worst) {
      worst = key;
      out.worst_point = p;
      out.worst_index = decode ? decode(f.worst_row) : std::vector<int>{static_cast<int>(f.worst_row)};
    }
  }
  if (any_fail) {
    out.verdict = Verdict::fails;
  } else if (any_na) {
    out.verdict = Verdict::not_applicable;
  } else if (all_vacuous) {
    out.verdict = Verdict::vacuous;
  } else {
    out.verdict = Verdict::holds;
  }
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::vacuous: return "vacuous";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "holds") return Verdict::holds;
  if (s == "fails") return Verdict::fails;
  if (s == "vacuous") return Verdict::vacuous;
  if (s == "not_applicable") return Verdict::not_applicable;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

double FitResult::max_residual() const {
  double m = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i)
    if (point_verdicts.empty() || point_verdicts[i] != Verdict::vacuous) m = std::max(m, residuals[i]);
  return m;
}

double FitResult::coefficient(std::size_t point, const std::string& key) const {
  if (point >= coefficients.size()) return kNaN;
  for (std::size_t k = 0; k < coefficient_names.size(); ++k)
    if (coefficient_names[k] == key) return coefficients[point](static_cast<Eigen::Index>(k));
  return kNaN;
}

constexpr double kSolveCutoff = 1e-8;

PointFit solve_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Tolerance& tol) {
  const Eigen::Index k = A.cols();
  PointFit pf;
  pf.coefficients = Eigen::VectorXd::Zero(k);
  const double bnorm = b.norm();

  std::vector<Eigen::Index> active;
  std::vector<double> scale;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double c = A.col(j).norm();
    if (c > tol.abs_floor) {
      active.push_back(j);
      scale.push_back(c);
    }
  }
  if (active.empty()) {
    pf.nullspace_dim = static_cast<int>(k);
    if (bnorm <= tol.abs_floor) {
      pf.verdict = Verdict::vacuous;
    } else {
      pf.verdict = Verdict::fails;
      pf.residual = 1.0;
      pf.worst_row = argmax_abs(b);
    }
    return pf;
  }

  Eigen::MatrixXd An(A.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) An.col(static_cast<Eigen::Index>(j)) = A.col(active[j]) / scale[j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(An, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // The rank cutoff never exceeds 1e-8, so loosening tol only loosens the
  // residual test and cannot discard directions the fit needs.
  svd.setThreshold(std::min(tol.rel, kSolveCutoff));
  const Eigen::VectorXd x = svd.solve(b);
  pf.nullspace_dim = static_cast<int>(k - svd.rank());
  for (std::size_t j = 0; j < active.size(); ++j) pf.coefficients(active[j]) = x(static_cast<Eigen::Index>(j)) / scale[j];

  if (bnorm <= tol.abs_floor) {
    pf.verdict = Verdict::holds;
    pf.coefficients.setZero();
    return pf;
  }
  const Eigen::VectorXd fitted = An * x;
  const Eigen::VectorXd r = b - fitted;
  pf.residual = r.norm() / std::max(bnorm, fitted.norm());
  pf.worst_row = argmax_abs(r);
  pf.verdict = pf.residual <= tol.rel ? Verdict::holds : Verdict::fails;
  return pf;
}

PointFit solve_point(const Eigen::VectorXd& lhs, const std::vector<Eigen::VectorXd>& basis, const Tolerance& tol) {
  Eigen::MatrixXd A(lhs.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != lhs.size()) throw std::invalid_argument("basis tensor has a different valence");
    A.col(static_cast<Eigen::Index>(j)) = basis[j];
  }
  return solve_system(A, lhs, tol);
}

FitResult aggregate(std::string name, std::vector<std::string> coefficient_names, const std::vector<PointFit>& fits,
                    int dim, int rank) {
  return aggregate_decoded(std::move(name), std::move(coefficient_names), fits,
                           rank > 0 ? tensor_decoder(dim, rank) : RowDecoder{});
}

// ---------------------------------------------------------------------------

FitResult fit_proportionality(const std::string& name, std::span<const NumericTensor> lhs,
                              std::span<const NumericTensor> rhs, const Tolerance& tol) {
  check_grid(lhs.size(), rhs.size(), name);
  std::vector<PointFit> fits;
  for (std::size_t p = 0; p < lhs.size(); ++p) fits.push_back(solve_point(flat(lhs[p]), {flat(rhs[p])}, tol));
  const int n = lhs.empty() ? 0 : lhs[0].dim();
  return aggregate(name, {"L"}, fits, n, lhs.empty() ? 0 : lhs[0].rank());
}

FitResult fit_combination(const std::string& name, std::span<const NumericTensor> lhs,
                          const std::vector<std::vector<NumericTensor>>& basis, std::vector<std::string> names,
                          const Tolerance& tol) {
  check_grid(lhs.size(), basis.size(), name);
  std::vector<PointFit> fits;
  for (std::size_t p = 0; p < lhs.size(); ++p) {
    std::vector<Eigen::VectorXd> cols;
    for (const auto& t : basis[p]) cols.push_back(flat(t));
    fits.push_back(solve_point(flat(lhs[p]), cols, tol));
  }
  const int n = lhs.empty() ? 0 : lhs[0].dim();
  return aggregate(name, std::move(names), fits, n, lhs.empty() ? 0 : lhs[0].rank());
}

FitResult fit_equality(const std::string& name, std::span<const NumericTensor> lhs, std::span<const NumericTensor> rhs,
                       const Tolerance& tol) {
  check_grid(lhs.size(), rhs.size(), name);
  std::vector<PointFit> fits;
  for (std::size_t p = 0; p < lhs.size(); ++p) {
    const Eigen::VectorXd l = flat(lhs[p]), r = flat(rhs[p]);
    const double scale = std::max(l.norm(), r.norm());
    fits.push_back(identity_point(l - r, scale, scale <= tol.abs_floor, tol));
  }
  const int n = lhs.empty() ? 0 : lhs[0].dim();
  return aggregate(name, {}, fits, n, lhs.empty() ? 0 : lhs[0].rank());
}

namespace {

// Builds one least-squares problem per point from row generators over all
// index tuples of a given rank.
template <class Row>
PointFit tuple_system(int n, int rank, int unknowns, Row&& row, const Tolerance& tol) {
  const std::size_t rows = NumericTensor::component_count(n, rank);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), unknowns);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
  for_each_index(n, rank, [&](const MultiIndex& idx, std::size_t r) {
    auto a_row = A.row(static_cast<Eigen::Index>(r));
    b(static_cast<Eigen::Index>(r)) = row(idx, a_row);
  });
  return solve_system(A, b, tol);
}

bool vanishes(const NumericTensor& t, const Tolerance& tol) { return norm(t) <= tol.abs_floor; }

}  // namespace

FitResult two_form_recurrency(const std::string& name, std::span<const NumericTensor> H,
                              std::span<const NumericTensor> dH, const Tolerance& tol) {
  check_grid(H.size(), dH.size(), name);
  const int n = H.empty() ? 0 : H[0].dim();
  std::vector<PointFit> fits;
  for (std::size_t p = 0; p < H.size(); ++p) {
    const NumericTensor& h = H[p];
    const NumericTensor& dh = dH[p];
    if (vanishes(h, tol) && vanishes(dh, tol)) {
      fits.push_back({});
      continue;
    }
    fits.push_back(tuple_system(
        n, 5, n,
        [&](const MultiIndex& i, auto a) {
          const int z1 = i[0], z2 = i[1], z3 = i[2], x = i[3], y = i[4];
          a(z1) += h(z2, z3, x, y);
          a(z2) += h(z3, z1, x, y);
          a(z3) += h(z1, z2, x, y);
          return dh(z2, z3, x, y, z1) + dh(z3, z1, x, y, z2) + dh(z1, z2, x, y, z3);
        },
        tol));
  }
  return aggregate(name, indexed("Pi", n), fits, n, 5);
}

FitResult recurrency_fit(const std::string& name, std::span<const NumericTensor> H, std::span<const NumericTensor> dH,
                         const Tolerance& tol) {
  check_grid(H.size(), dH.size(), name);
  const int n = H.empty() ? 0 : H[0].dim();
  const int k = H.empty() ? 0 : H[0].rank();
  std::vector<PointFit> fits;
  for (std::size_t p = 0; p < H.size(); ++p) {
    const NumericTensor& h = H[p];
    const NumericTensor& dh = dH[p];
    if (vanishes(h, tol) && vanishes(dh, tol)) {
      fits.push_back({});
      continue;
    }
    fits.push_back(tuple_system(
        n, k + 1, n,
        [&](const MultiIndex& i, auto a) {
          std::size_t off = 0;
          for (int s = 0; s < k; ++s) off = off * n + i[s];
          a(i[k]) = h[off];
          return dh[off * n + i[k]];
        },
        tol));
  }
  return aggregate(name, indexed("Pi", n), fits, n, k + 1);
}

std::vector<FitResult> weak_symmetry_fit(const std::string& field, std::span<const NumericTensor> H,
                                         std::span<const NumericTensor> dH, const Tolerance& tol) {
  check_grid(H.size(), dH.size(), "weak symmetry");
  const int n = H.empty() ? 0 : H[0].dim();
  std::vector<PointFit> general, chaki, recurrent;
  for (std::size_t p = 0; p < H.size(); ++p) {
    const NumericTensor& h = H[p];
    const NumericTensor& dh = dH[p];
    if (vanishes(h, tol) && vanishes(dh, tol)) {
      general.push_back({});
      chaki.push_back({});
      recurrent.push_back({});
      continue;
    }
    // Row (a,b,c,d,e): dH_{abcd,e} = Pi_e H_abcd + Phi_a H_ebcd + Phibar_b H_aecd + Psi_c H_abed + Psibar_d H_abce
    general.push_back(tuple_system(
        n, 5, 5 * n,
        [&](const MultiIndex& i, auto A) {
          const int a = i[0], b = i[1], c = i[2], d = i[3], e = i[4];
          A(e) += h(a, b, c, d);
          A(n + a) += h(e, b, c, d);
          A(2 * n + b) += h(a, e, c, d);
          A(3 * n + c) += h(a, b, e, d);
          A(4 * n + d) += h(a, b, c, e);
          return dh(a, b, c, d, e);
        },
        tol));
    chaki.push_back(tuple_system(
        n, 5, n,
        [&](const MultiIndex& i, auto A) {
          const int a = i[0], b = i[1], c = i[2], d = i[3], e = i[4];
          A(e) += 2.0 * h(a, b, c, d);
          A(a) += h(e, b, c, d);
          A(b) += h(a, e, c, d);
          A(c) += h(a, b, e, d);
          A(d) += h(a, b, c, e);
          return dh(a, b, c, d, e);
        },
        tol));
    recurrent.push_back(tuple_system(
        n, 5, n,
        [&](const MultiIndex& i, auto A) {
          A(i[4]) += h(i[0], i[1], i[2], i[3]);
          return dh(i[0], i[1], i[2], i[3], i[4]);
        },
        tol));
  }
  std::vector<std::string> names;
  for (const char* stem : {"Pi", "Phi", "Phibar", "Psi", "Psibar"}) {
    auto part = indexed(stem, n);
    names.insert(names.end(), part.begin(), part.end());
  }
  std::vector<FitResult> out;
  out.push_back(aggregate("weakly_symmetric[" + field + "]", names, general, n, 5));
  out.push_back(aggregate("chaki_pseudosymmetric[" + field + "]", indexed("A", n), chaki, n, 5));
  FitResult rec = aggregate("recurrent[" + field + "]", indexed("Pi", n), recurrent, n, 5);
  out.push_back(std::move(rec));
  return out;
}

FitResult venzi_dimension(const std::string& name, std::span<const NumericTensor> H, const Tolerance& tol) {
  const int n = H.empty() ? 0 : H[0].dim();
  std::vector<PointFit> fits;
  int min_dim = n;
  for (const NumericTensor& h : H) {
    PointFit pf;
    pf.coefficients = Eigen::VectorXd::Constant(1, n);
    if (vanishes(h, tol)) {
      pf.verdict = Verdict::vacuous;
      pf.nullspace_dim = n;
      fits.push_back(pf);
      continue;
    }
    const std::size_t rows = NumericTensor::component_count(n, 5);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), n);
    for_each_index(n, 5, [&](const MultiIndex& i, std::size_t r) {
      const int z1 = i[0], z2 = i[1], z3 = i[2], x = i[3], y = i[4];
      const auto row = static_cast<Eigen::Index>(r);
      A(row, z1) += h(z2, z3, x, y);
      A(row, z2) += h(z3, z1, x, y);
      A(row, z3) += h(z1, z2, x, y);
    });
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double cutoff = tol.rel * (sv.size() ? sv(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff && sv(i) > tol.abs_floor) ++rank;
    const int dim = n - rank;
    pf.coefficients(0) = dim;
    pf.nullspace_dim = dim;
    pf.verdict = dim >= 1 ? Verdict::holds : Verdict::fails;
    pf.residual = sv.size() && sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    min_dim = std::min(min_dim, dim);
    fits.push_back(pf);
  }
  FitResult out = aggregate(name, {"dim"}, fits);
  out.worst_index.clear();
  out.order = min_dim;
  return out;
}

FitResult compatibility_check(const std::string& name, std::span<const NumericTensor> H,
                              std::span<const NumericTensor> E, std::span<const NumericTensor> ginv,
                              const Tolerance& tol) {
  check_grid(H.size(), E.size(), name);
  check_grid(H.size(), ginv.size(), name);
  const int n = H.empty() ? 0 : H[0].dim();
  std::vector<PointFit> fits;
  for (std::size_t p = 0; p < H.size(); ++p) {
    const NumericTensor& h = H[p];
    const Eigen::MatrixXd endo = as_matrix(ginv[p]) * as_matrix(E[p]);  // endo(a,b) = E^a_b
    // T(z1, x, z2, z3) = sum_a E^a_{z1} H(a, x, z2, z3)
    NumericTensor T(n, 4);
    for_each_index(n, 4, [&](const MultiIndex& i, std::size_t f) {
      double v = 0.0;
      for (int a = 0; a < n; ++a) v += endo(a, i[0]) * h(a, i[1], i[2], i[3]);
      T[f] = v;
    });
    NumericTensor cyc(n, 4);
    for_each_index(n, 4, [&](const MultiIndex& i, std::size_t f) {
      const int z1 = i[0], x = i[1], z2 = i[2], z3 = i[3];
      cyc[f] = T(z1, x, z2, z3) + T(z2, x, z3, z1) + T(z3, x, z1, z2);
    });
    fits.push_back(identity_point(flat(cyc), norm(T), vanishes(T, tol), tol));
  }
  return aggregate(name, {}, fits, n, 4);
}

// ---------------------------------------------------------------------------

std::vector<NumericTensor> collect(const SampledGeometry& sg, std::string_view field) {
  std::vector<NumericTensor> out;
  out.reserve(sg.size());
  for (const auto& p : sg.points()) out.push_back(p.field(field));
  return out;
}

std::vector<NumericTensor> collect_action(const SampledGeometry& sg, std::string_view A, std::string_view T) {
  std::vector<NumericTensor> out;
  out.reserve(sg.size());
  for (const auto& p : sg.points()) out.push_back(curvature_action(p.field(A), p.field(T), p.ginv()));
  return out;
}

std::vector<NumericTensor> collect_q(const SampledGeometry& sg, std::string_view B, std::string_view T) {
  std::vector<NumericTensor> out;
  out.reserve(sg.size());
  for (const auto& p : sg.points()) out.push_back(q_operator(p.field(B), p.field(T)));
  return out;
}

std::vector<FitResult> pseudosymmetry_suite(const SampledGeometry& sg, const Tolerance& tol) {
  static const char* kActing[] = {"R", "C", "W", "K"};
  static const char* kActed[] = {"R", "S", "C", "W", "K"};
  std::vector<FitResult> fits, semi;
  std::map<std::string, std::vector<NumericTensor>> q;
  for (const char* T : kActed) q[T] = collect_q(sg, "g", T);
  for (const char* A : kActing) {
    for (const char* T : kActed) {
      const std::string tag = std::string(A) + "." + T;
      const auto lhs = collect_action(sg, A, T);
      fits.push_back(fit_proportionality("pseudosymmetric[" + tag + "]", lhs, q[T], tol));

      std::vector<PointFit> pts;
      for (std::size_t p = 0; p < sg.size(); ++p) {
        const double na = norm(sg[p].field(A)), nt = norm(sg[p].field(T));
        const double scale = na * nt * norm(sg[p].ginv());
        pts.push_back(identity_point(flat(lhs[p]), scale, na <= tol.abs_floor || nt <= tol.abs_floor, tol));
      }
      const int n = sg.geometry().dim();
      semi.push_back(aggregate("semisymmetric[" + tag + "]", {}, pts, n, lhs.empty() ? 0 : lhs[0].rank()));
    }
  }
  fits.insert(fits.end(), semi.begin(), semi.end());
  return fits;
}

std::vector<FitResult> mixed_condition_suite(const SampledGeometry& sg, const Tolerance& tol) {
  std::vector<FitResult> out;
  const auto RR = collect_action(sg, "R", "R");
  const auto QSR = collect_q(sg, "S", "R");
  const auto QgC = collect_q(sg, "g", "C");
  const auto QgR = collect_q(sg, "g", "R");
  const auto QSC = collect_q(sg, "S", "C");
  const auto CR = collect_action(sg, "C", "R");
  const auto RC = collect_action(sg, "R", "C");

  std::vector<NumericTensor> sps, commutator;
  std::vector<std::vector<NumericTensor>> basis;
  for (std::size_t p = 0; p < sg.size(); ++p) {
    sps.push_back(RR[p] - QSR[p]);
    commutator.push_back(CR[p] - RC[p]);
    basis.push_back({QgR[p], QSR[p]});
  }
  out.push_back(fit_proportionality("sps[R.R-Q(S,R)~Q(g,C)]", sps, QgC, tol));
  out.push_back(fit_equality("identity[Q(S,C)=C.R-R.C]", QSC, commutator, tol));
  out.push_back(fit_combination("combination[C.R-R.C~Q(g,R),Q(S,R)]", commutator, basis, {"L3", "L4"}, tol));
  return out;
}

FitResult roter_fit(const SampledGeometry& sg, bool generalized, const Tolerance& tol) {
  const int n = sg.geometry().dim();
  std::vector<std::array<int, 4>> canon;
  for_each_riemann_canonical(n, [&](int a, int b, int c, int d) { canon.push_back({a, b, c, d}); });
  auto restrict = [&](const NumericTensor& t) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(canon.size()));
    for (std::size_t i = 0; i < canon.size(); ++i) v(static_cast<Eigen::Index>(i)) = t(canon[i][0], canon[i][1], canon[i][2], canon[i][3]);
    return v;
  };
  std::vector<PointFit> fits;
  for (const auto& p : sg.points()) {
    const NumericTensor &g = p.g(), &S = p.field("S"), &S2 = p.field("S2");
    std::vector<Eigen::VectorXd> basis;
    if (generalized) {
      for (const auto& t : {kulkarni_nomizu(S, S), kulkarni_nomizu(S, S2), kulkarni_nomizu(S2, S2),
                            kulkarni_nomizu(g, g), kulkarni_nomizu(g, S), kulkarni_nomizu(g, S2)})
        basis.push_back(restrict(t));
    } else {
      for (const auto& t : {kulkarni_nomizu(S, S), kulkarni_nomizu(g, S), kulkarni_nomizu(g, g)})
        basis.push_back(restrict(t));
    }
    const Eigen::VectorXd lhs = restrict(p.field("R"));
    if (lhs.norm() <= tol.abs_floor && norm(S) <= tol.abs_floor) {
      PointFit pf;
      pf.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
      fits.push_back(pf);
      continue;
    }
    fits.push_back(solve_point(lhs, basis, tol));
  }
  std::vector<std::string> names = generalized ? std::vector<std::string>{"e1", "e2", "e3", "e4", "e5", "e6"}
                                               : std::vector<std::string>{"N1", "N2", "N3"};
  RowDecoder decode = [canon](Eigen::Index row) {
    const auto& c = canon[static_cast<std::size_t>(row)];
    return std::vector<int>(c.begin(), c.end());
  };
  return aggregate_decoded(generalized ? "generalized_roter" : "roter", names, fits, decode);
}

FitResult ein_level(const SampledGeometry& sg, const Tolerance& tol) {
  const int n = sg.geometry().dim();
  static const char* kPowers[] = {"g", "S", "S2", "S3", "S4"};
  const int kmax = 4;

  struct Level {
    int k = -1;  // -1: vacuous, kmax+1: none found
    double ratio = 0.0;
  };
  std::vector<Level> levels;
  auto matrix = [&](const PointGeometry& p, int k) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n) * n, k + 1);
    for (int j = 0; j <= k; ++j) M.col(j) = flat(p.field(kPowers[j]));
    return M;
  };
  for (const auto& p : sg.points()) {
    Level lv;
    if (norm(p.field("S")) <= tol.abs_floor) {
      levels.push_back(lv);
      continue;
    }
    lv.k = kmax + 1;
    for (int k = 1; k <= kmax; ++k) {
      Eigen::MatrixXd M = matrix(p, k);
      for (int j = 0; j <= k; ++j) M.col(j).normalize();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
      const auto& sv = svd.singularValues();
      const double ratio = sv(k) / sv(0);
      if (ratio <= tol.rel) {
        lv.k = k;
        lv.ratio = ratio;
        break;
      }
    }
    levels.push_back(lv);
  }
  int K = -1;
  for (const auto& lv : levels) K = std::max(K, lv.k);

  FitResult out;
  if (K < 0) {
    std::vector<PointFit> fits(levels.size());
    out = aggregate("ein_level", {}, fits);
    out.order = 0;
    out.note = "Ricci tensor vanishes";
    return out;
  }
  const int kfit = std::min(K, kmax);
  std::vector<std::string> names;
  for (int j = 0; j <= kfit; ++j) names.push_back("n" + std::to_string(j));
  std::vector<PointFit> fits;
  bool mixed = false;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    PointFit pf;
    if (levels[i].k < 0) {
      fits.push_back(pf);
      continue;
    }
    mixed = mixed || levels[i].k != K;
    Eigen::MatrixXd M = matrix(sg[i], kfit);
    Eigen::VectorXd cn(kfit + 1);
    for (int j = 0; j <= kfit; ++j) {
      cn(j) = M.col(j).norm();
      M.col(j) /= cn(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
    Eigen::VectorXd v = svd.matrixV().col(kfit).cwiseQuotient(cn);
    v /= v(kfit);
    pf.coefficients = v;
    const auto& sv = svd.singularValues();
    pf.residual = sv(kfit) / sv(0);
    pf.verdict = levels[i].k <= kmax ? Verdict::holds : Verdict::fails;
    pf.worst_row = 0;
    fits.push_back(pf);
  }
  out = aggregate("ein_level", names, fits);
  out.worst_index.clear();
  out.order = K <= kmax ? K : kmax + 1;
  if (K > kmax) out.note = "beyond Ein(4)";
  if (mixed) out.note = "level varies across the grid; maximum reported";
  return out;
}

namespace {

struct QeCandidate {
  double alpha = 0.0;
  int rank = 0;
};

int numerical_rank(const Eigen::MatrixXd& M, double cutoff) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff) ++r;
  return r;
}

// Candidate alphas at one point, best first.
std::vector<QeCandidate> qe_candidates(const PointGeometry& p, const Tolerance& tol) {
  const Eigen::MatrixXd S = as_matrix(p.field("S"));
  const Eigen::MatrixXd g = as_matrix(p.g());
  const Eigen::MatrixXd J = as_matrix(p.ginv()) * S;
  Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
  const auto& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  const double cluster = 1e-6 * scale;

  std::vector<double> reals;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::fabs(ev(i).imag()) <= cluster) reals.push_back(ev(i).real());
  std::sort(reals.begin(), reals.end());
  std::vector<double> alphas;
  for (std::size_t i = 0; i < reals.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < reals.size() && reals[j] - reals[i] <= cluster) sum += reals[j++];
    alphas.push_back(sum / static_cast<double>(j - i));
    i = j;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> ss(S), gs(g);
  const double s_scale = ss.singularValues()(0);
  const double g_scale = gs.singularValues()(0);
  std::vector<QeCandidate> out;
  for (double a : alphas) {
    if (std::fabs(a) <= tol.rel * scale) a = 0.0;
    const double cutoff = tol.rel * std::max(s_scale, std::fabs(a) * g_scale);
    out.push_back({a, numerical_rank(S - a * g, cutoff)});
  }
  std::sort(out.begin(), out.end(), [&](const QeCandidate& x, const QeCandidate& y) {
    if (x.rank != y.rank) return x.rank < y.rank;
    const double ax = std::fabs(x.alpha), ay = std::fabs(y.alpha);
    if (std::fabs(ax - ay) > cluster) return ax < ay;
    return x.alpha > y.alpha;
  });
  return out;
}

}  // namespace

FitResult quasi_einstein_rank(const SampledGeometry& sg, const Tolerance& tol) {
  std::vector<PointFit> fits;
  std::vector<int> ranks;
  for (const auto& p : sg.points()) {
    PointFit pf;
    if (norm(p.field("S")) <= tol.abs_floor) {
      fits.push_back(pf);
      continue;
    }
    const auto cands = qe_candidates(p, tol);
    pf.verdict = Verdict::holds;
    pf.coefficients = Eigen::VectorXd::Constant(1, cands.empty() ? kNaN : cands.front().alpha);
    ranks.push_back(cands.empty() ? sg.geometry().dim() : cands.front().rank);
    fits.push_back(pf);
  }
  FitResult out = aggregate("quasi_einstein", {"alpha"}, fits);
  out.worst_index.clear();
  if (ranks.empty()) {
    out.order = 0;
    out.note = "Ricci tensor vanishes";
    return out;
  }
  out.order = ranks.front();
  if (std::any_of(ranks.begin(), ranks.end(), [&](int r) { return r != ranks.front(); })) {
    out.verdict = Verdict::fails;
    out.order = *std::max_element(ranks.begin(), ranks.end());
    out.note = "rank of S - alpha g varies across the grid";
  }
  return out;
}

FitResult generalized_qe_chaki(const SampledGeometry& sg, const Tolerance& tol) {
  const int n = sg.geometry().dim();
  std::vector<std::string> names{"alpha", "beta", "gamma", "norm_Pi", "norm_delta"};
  for (auto& s : indexed("Pi", n)) names.push_back(s);
  for (auto& s : indexed("delta", n)) names.push_back(s);

  std::vector<PointFit> fits;
  std::string note;
  for (const auto& p : sg.points()) {
    PointFit pf;
    if (norm(p.field("S")) <= tol.abs_floor) {
      fits.push_back(pf);
      continue;
    }
    const Eigen::MatrixXd S = as_matrix(p.field("S"));
    const Eigen::MatrixXd g = as_matrix(p.g());
    const Eigen::MatrixXd gi = as_matrix(p.ginv());

    // First rank-2 candidate whose image plane carries a Lorentzian induced metric.
    bool rank2 = false, found = false;
    double alpha = 0.0;
    Eigen::MatrixXd M, V;
    Eigen::Matrix2d h;
    for (const auto& c : qe_candidates(p, tol)) {
      if (c.rank != 2) continue;
      rank2 = true;
      M = S - c.alpha * g;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
      V = svd.matrixV().leftCols(2);
      h = V.transpose() * gi * V;
      if (h.determinant() < 0.0) {
        alpha = c.alpha;
        found = true;
        break;
      }
    }
    if (!rank2) {
      pf.verdict = Verdict::not_applicable;
      fits.push_back(pf);
      continue;
    }
    if (!found) {
      pf.verdict = Verdict::fails;
      pf.residual = 1.0;
      note = "induced metric on the image plane is definite";
      fits.push_back(pf);
      continue;
    }

    // Null covectors in the plane: y^T h y = 0.
    std::array<Eigen::Vector2d, 2> ys;
    const double disc = std::sqrt(std::max(0.0, h(0, 1) * h(0, 1) - h(0, 0) * h(1, 1)));
    if (std::fabs(h(0, 0)) > 1e-12 * h.cwiseAbs().maxCoeff()) {
      ys[0] = {-h(0, 1) + disc, h(0, 0)};
      ys[1] = {-h(0, 1) - disc, h(0, 0)};
    } else {
      ys[0] = {1.0, 0.0};
      ys[1] = {h(1, 1), -2.0 * h(0, 1)};
    }
    std::array<Eigen::VectorXd, 2> nv;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd v = V * ys[i];
      v.normalize();
      const double big = v.cwiseAbs().maxCoeff();
      for (Eigen::Index j = v.size() - 1; j >= 0; --j) {
        if (std::fabs(v(j)) > 1e-12 * big) {
          if (v(j) < 0) v = -v;
          break;
        }
      }
      nv[i] = v;
    }
    if (std::lexicographical_compare(nv[1].begin(), nv[1].end(), nv[0].begin(), nv[0].end())) std::swap(nv[0], nv[1]);

    // M = a n1 n1 + b n2 n2 + c (n1 n2 + n2 n1)
    Eigen::MatrixXd B(n * n, 3);
    const Eigen::MatrixXd t11 = nv[0] * nv[0].transpose(), t22 = nv[1] * nv[1].transpose();
    const Eigen::MatrixXd t12 = nv[0] * nv[1].transpose() + nv[1] * nv[0].transpose();
    B.col(0) = Eigen::Map<const Eigen::VectorXd>(t11.data(), n * n);
    B.col(1) = Eigen::Map<const Eigen::VectorXd>(t22.data(), n * n);
    B.col(2) = Eigen::Map<const Eigen::VectorXd>(t12.data(), n * n);
    const Eigen::VectorXd mv = Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd(M).data(), n * n);
    Eigen::Vector3d abc = B.colPivHouseholderQr().solve(mv);
    const double big = abc.cwiseAbs().maxCoeff();
    const double zero = std::sqrt(tol.rel) * big;
    if (std::fabs(abc(1)) > zero && std::fabs(abc(0)) <= zero) {
      std::swap(nv[0], nv[1]);
      std::swap(abc(0), abc(1));
    }
    if (std::fabs(abc(1)) > zero || std::fabs(abc(2)) <= zero) {
      pf.verdict = Verdict::fails;
      pf.residual = 1.0;
      note = "no null direction splits S - alpha g";
      fits.push_back(pf);
      continue;
    }
    // beta = -1, gamma = 1: M = -Pi Pi + Pi delta + delta Pi
    const double a = abc(0), c = abc(2);
    const double pnorm = std::sqrt(2.0 * std::fabs(c));
    const Eigen::VectorXd Pi = pnorm * nv[0];
    const Eigen::VectorXd delta = (a + pnorm * pnorm) / (2.0 * pnorm) * nv[0] + (c / pnorm) * nv[1];
    const Eigen::MatrixXd model = -Pi * Pi.transpose() + Pi * delta.transpose() + delta * Pi.transpose();
    const Eigen::MatrixXd defect = M - model;

    pf.coefficients.resize(5 + 2 * n);
    pf.coefficients << alpha, -1.0, 1.0, Pi.dot(gi * Pi), delta.dot(gi * delta), Pi, delta;
    pf.residual = defect.norm() / M.norm();
    Eigen::Index r, cidx;
    defect.cwiseAbs().maxCoeff(&r, &cidx);
    pf.worst_row = r * n + cidx;
    pf.verdict = pf.residual <= tol.rel ? Verdict::holds : Verdict::fails;
    fits.push_back(pf);
  }
  FitResult out = aggregate("chaki_generalized_quasi_einstein", names, fits, n, 2);
  out.note = note;
  return out;
}

FitResult ricci_1form_recurrency(const SampledGeometry& sg, const Tolerance& tol) {
  const int n = sg.geometry().dim();
  std::vector<PointFit> fits;
  for (const auto& p : sg.points()) {
    const NumericTensor& S = p.field("S");
    const NumericTensor& dS = p.field("nablaS");
    if (vanishes(S, tol) && vanishes(dS, tol)) {
      fits.push_back({});
      continue;
    }
    // (z1, z2, x): dS(z2,x,z1) - dS(z1,x,z2) = Pi_z1 S(z2,x) - Pi_z2 S(z1,x)
    fits.push_back(tuple_system(
        n, 3, n,
        [&](const MultiIndex& i, auto A) {
          const int z1 = i[0], z2 = i[1], x = i[2];
          A(z1) += S(z2, x);
          A(z2) -= S(z1, x);
          return dS(z2, x, z1) - dS(z1, x, z2);
        },
        tol));
  }
  return aggregate("ricci_1form_recurrency", indexed("Pi", n), fits, n, 3);
}

std::vector<FitResult> ricci_differential_checks(const SampledGeometry& sg, const Tolerance& tol) {
  const int n = sg.geometry().dim();
  std::vector<PointFit> cyclic, codazzi;
  for (const auto& p : sg.points()) {
    const NumericTensor& S = p.field("S");
    const NumericTensor& dS = p.field("nablaS");
    const bool vac = vanishes(S, tol) && vanishes(dS, tol);
    NumericTensor cyc(n, 3), skew(n, 3);
    for_each_index(n, 3, [&](const MultiIndex& i, std::size_t f) {
      const int a = i[0], b = i[1], c = i[2];
      // dS(x, y, z) = (nabla_z S)(x, y)
      cyc[f] = dS(b, c, a) + dS(c, a, b) + dS(a, b, c);
      skew[f] = dS(b, c, a) - dS(a, c, b);
    });
    const double scale = norm(dS);
    cyclic.push_back(identity_point(flat(cyc), scale, vac, tol));
    codazzi.push_back(identity_point(flat(skew), scale, vac, tol));
  }
  return {aggregate("cyclic_parallel_ricci", {}, cyclic, n, 3), aggregate("codazzi_ricci", {}, codazzi, n, 3)};
}

std::vector<FitResult> compatibility_suite(const SampledGeometry& sg, const Tolerance& tol) {
  std::vector<FitResult> out;
  const auto S = collect(sg, "S");
  const auto gi = collect(sg, "ginv");
  for (const char* H : {"R", "C", "W", "K", "P"})
    out.push_back(compatibility_check(std::string("compatible[") + H + ",S]", collect(sg, H), S, gi, tol));
  return out;
}

std::vector<FitResult> classify(const SampledGeometry& sg, const Tolerance& tol) {
  std::vector<FitResult> out;
  auto append = [&](std::vector<FitResult> v) {
    for (auto& f : v) out.push_back(std::move(f));
  };
  append(pseudosymmetry_suite(sg, tol));
  append(mixed_condition_suite(sg, tol));
  if (sg.size() && sg[0].has("F")) {
    const auto F = collect(sg, "F");
    out.push_back(fit_proportionality("pseudosymmetric[R.F]", collect_action(sg, "R", "F"), collect_q(sg, "g", "F"), tol));
    out.push_back(fit_proportionality("pseudosymmetric[C.F]", collect_action(sg, "C", "F"), collect_q(sg, "g", "F"), tol));
  }
  out.push_back(roter_fit(sg, false, tol));
  out.push_back(roter_fit(sg, true, tol));
  out.push_back(ein_level(sg, tol));
  out.push_back(quasi_einstein_rank(sg, tol));
  out.push_back(generalized_qe_chaki(sg, tol));
  for (const char* H : {"R", "C", "W", "K"}) {
    const std::string nabla = std::string("nabla") + H;
    if (!sg.size() || !sg[0].has(nabla)) continue;
    out.push_back(two_form_recurrency(std::string("two_form_recurrent[") + H + "]", collect(sg, H), collect(sg, nabla), tol));
  }
  for (const char* H : {"C", "W", "K"}) {
    const std::string nabla = std::string("nabla") + H;
    if (!sg.size() || !sg[0].has(nabla)) continue;
    out.push_back(recurrency_fit(std::string("recurrent[") + H + "]", collect(sg, H), collect(sg, nabla), tol));
  }
  if (sg.size() && sg[0].has("nablaR")) append(weak_symmetry_fit("R", collect(sg, "R"), collect(sg, "nablaR"), tol));
  if (sg.size() && sg[0].has("nablaS")) {
    out.push_back(ricci_1form_recurrency(sg, tol));
    append(ricci_differential_checks(sg, tol));
  }
  append(compatibility_suite(sg, tol));
  for (const char* H : {"R", "C", "W", "K"})
    out.push_back(venzi_dimension(std::string("venzi[") + H + "]", collect(sg, H), tol));
  return out;
}

}  // namespace curvkit
