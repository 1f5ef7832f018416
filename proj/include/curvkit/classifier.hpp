// Pointwise structure detectors.
//
// Every detector works on a SampledGeometry: the condition is tested
// independently at each grid point and the per-point verdicts are combined
// (any fails -> fails; all vacuous -> vacuous; otherwise holds). Coefficient
// functions are fitted by least squares per point.
#ifndef CURVKIT_CLASSIFIER_HPP
#define CURVKIT_CLASSIFIER_HPP

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "curvkit/sampled.hpp"

namespace curvkit {

enum class Verdict { holds, fails, vacuous, not_applicable };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct FitResult {
  std::string name;
  Verdict verdict = Verdict::vacuous;
  std::vector<std::string> coefficient_names;
  /// One vector per grid point; NaN entries where the point is vacuous.
  std::vector<Eigen::VectorXd> coefficients;
  /// Relative residual per grid point.
  std::vector<double> residuals;
  std::vector<Verdict> point_verdicts;
  std::size_t worst_point = 0;
  /// 0-based component index (or equation row) of the largest violation.
  std::vector<int> worst_index;
  /// Largest numerical nullspace dimension of the fitting problem.
  int nullspace_dim = 0;
  /// Detector-specific integer result: Ein level, quasi-Einstein rank,
  /// Venzi dimension. -1 when unused.
  int order = -1;
  std::string note;

  double max_residual() const;
  /// Coefficient `name` at grid point `point`; NaN if absent.
  double coefficient(std::size_t point, const std::string& name) const;
  bool holds() const { return verdict == Verdict::holds; }
};

/// Result of one least-squares problem at one point.
struct PointFit {
  Verdict verdict = Verdict::vacuous;
  Eigen::VectorXd coefficients;
  double residual = 0.0;
  Eigen::Index worst_row = 0;
  int nullspace_dim = 0;
};

/// Solves lhs ~ sum_i x_i basis_i (columns normalized, SVD min-norm with
/// rank cutoff min(tol.rel, 1e-8), which also sets nullspace_dim).
/// holds iff ||lhs - B x|| <= tol.rel * max(||lhs||, ||B x||); vacuous iff lhs
/// and every basis vector are below tol.abs_floor.
PointFit solve_point(const Eigen::VectorXd& lhs, const std::vector<Eigen::VectorXd>& basis, const Tolerance& tol);

/// Same for a general linear system A x = b with unnormalized columns.
PointFit solve_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Tolerance& tol);

/// Combines per-point fits. `shape` decodes worst rows into index tuples
/// (dim, rank); pass rank 0 to keep the raw row number.
FitResult aggregate(std::string name, std::vector<std::string> coefficient_names, const std::vector<PointFit>& fits,
                    int dim = 0, int rank = 0);

// ---------------------------------------------------------------------------
// Generic fits over sampled tensors (one tensor per grid point)

/// lhs = L * rhs with L = <lhs,rhs>/<rhs,rhs>.
FitResult fit_proportionality(const std::string& name, std::span<const NumericTensor> lhs,
                              std::span<const NumericTensor> rhs, const Tolerance& tol);

/// lhs = sum_i c_i basis_i; basis[p] holds the basis tensors at point p.
FitResult fit_combination(const std::string& name, std::span<const NumericTensor> lhs,
                          const std::vector<std::vector<NumericTensor>>& basis, std::vector<std::string> names,
                          const Tolerance& tol);

/// lhs = rhs componentwise, relative to max(||lhs||, ||rhs||).
FitResult fit_equality(const std::string& name, std::span<const NumericTensor> lhs, std::span<const NumericTensor> rhs,
                       const Tolerance& tol);

/// Curvature 2-form recurrency of a (0,4) H with 1-form Pi.
FitResult two_form_recurrency(const std::string& name, std::span<const NumericTensor> H,
                              std::span<const NumericTensor> dH, const Tolerance& tol);

/// Plain recurrency H_{abcd,e} = Pi_e H_abcd.
FitResult recurrency_fit(const std::string& name, std::span<const NumericTensor> H, std::span<const NumericTensor> dH,
                         const Tolerance& tol);

/// Weak symmetry in 5n unknowns plus its Chaki-pseudosymmetric and recurrent
/// specializations, in that order.
std::vector<FitResult> weak_symmetry_fit(const std::string& field, std::span<const NumericTensor> H,
                                         std::span<const NumericTensor> dH, const Tolerance& tol);

/// Dimension of the space of covectors theta with
/// cyclic_{z1 z2 z3} theta(z1) H(z2, z3, x, y) = 0. Reported in `order`
/// (minimum over the grid) and per point as the coefficient "dim".
FitResult venzi_dimension(const std::string& name, std::span<const NumericTensor> H, const Tolerance& tol);

/// cyclic_{z1 z2 z3} H(E z1, x, z2, z3) = 0 with E raised by ginv.
FitResult compatibility_check(const std::string& name, std::span<const NumericTensor> H,
                              std::span<const NumericTensor> E, std::span<const NumericTensor> ginv,
                              const Tolerance& tol);

// ---------------------------------------------------------------------------
// Suites over a sampled geometry

/// Named field at every grid point.
std::vector<NumericTensor> collect(const SampledGeometry& sg, std::string_view field);
/// A.T at every grid point.
std::vector<NumericTensor> collect_action(const SampledGeometry& sg, std::string_view A, std::string_view T);
/// Q(B,T) at every grid point.
std::vector<NumericTensor> collect_q(const SampledGeometry& sg, std::string_view B, std::string_view T);

/// A.T = L Q(g,T) for A in {R,C,W,K}, T in {R,S,C,W,K}, followed by the
/// semisymmetry checks A.T = 0.
std::vector<FitResult> pseudosymmetry_suite(const SampledGeometry& sg, const Tolerance& tol);

/// R.R - Q(S,R) = L Q(g,C); Q(S,C) = C.R - R.C; C.R - R.C = L3 Q(g,R) + L4 Q(S,R).
std::vector<FitResult> mixed_condition_suite(const SampledGeometry& sg, const Tolerance& tol);

/// Roter: R = N1 S^S + N2 g^S + N3 g^g. Generalized: coefficients e1..e6 of
/// S^S, S^S2, S2^S2, g^g, g^S, g^S2. Fitted on independent Riemann components.
FitResult roter_fit(const SampledGeometry& sg, bool generalized, const Tolerance& tol);

/// Smallest k with {g, S, ..., S^k} dependent at every point. Coefficients
/// n0..nk normalized to nk = 1.
FitResult ein_level(const SampledGeometry& sg, const Tolerance& tol);

/// rank(S - alpha g) minimized over the Ricci-operator eigenvalues alpha.
/// Ties: smaller rank, then smaller |alpha|, then positive alpha.
FitResult quasi_einstein_rank(const SampledGeometry& sg, const Tolerance& tol);

/// S = alpha g + beta Pi(x)Pi + gamma (Pi(x)delta + delta(x)Pi) with Pi null.
/// Coefficients: alpha, beta, gamma, norm_Pi, norm_delta, Pi_1..Pi_n, delta_1..delta_n.
/// Norms are g^{ab} v_a v_b.
FitResult generalized_qe_chaki(const SampledGeometry& sg, const Tolerance& tol);

/// Ricci 1-form recurrency with covector Pi.
FitResult ricci_1form_recurrency(const SampledGeometry& sg, const Tolerance& tol);

/// Cyclic parallel and Codazzi-type Ricci tensor.
std::vector<FitResult> ricci_differential_checks(const SampledGeometry& sg, const Tolerance& tol);

/// H-compatibility of S for H in {R, C, W, K, P}.
std::vector<FitResult> compatibility_suite(const SampledGeometry& sg, const Tolerance& tol);

/// Everything above, in a fixed order.
std::vector<FitResult> classify(const SampledGeometry& sg, const Tolerance& tol);

}  // namespace curvkit

#endif  // CURVKIT_CLASSIFIER_HPP
