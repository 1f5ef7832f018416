// Independent reference computations used to cross-check the library.
//
// Nothing here calls the symbolic pipeline, the operators or the fitting
// code it is compared against: curvature comes from finite differences of
// the sampled metric, operators from explicit endomorphism matrices, fits
// from normal equations and ranks from Gaussian elimination.
#ifndef CURVKIT_ORACLES_HPP
#define CURVKIT_ORACLES_HPP

#include <span>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"
#include "curvkit/claims.hpp"
#include "curvkit/tensor.hpp"

namespace curvkit::oracle {

/// Gamma(a,b,c) = Gamma^a_bc by central differences of the metric (step h).
NumericTensor fd_christoffel(const MetricSpec& m, std::span<const double> x, const ParamEnv& params, double h = 1e-5);

/// R_abcd = g_ae (d_c Gamma^e_bd - d_d Gamma^e_bc + Gamma^f_bd Gamma^e_fc - Gamma^f_bc Gamma^e_fd),
/// with the outer derivative taken by central differences of fd_christoffel.
NumericTensor fd_riemann(const MetricSpec& m, std::span<const double> x, const ParamEnv& params, double h = 1e-4);

/// (A.T)(Z1..Zk; U, V) = -sum_i T(.., A(U,V) Zi, ..) with A(U,V)Z^s = g^{st} A(U,V,Z,e_t).
NumericTensor brute_action(const NumericTensor& A, const NumericTensor& T, const NumericTensor& ginv);

/// Q(B,T)(Z1..Zk; U, V) = -sum_i T(.., (U ^_B V) Zi, ..), (U ^_B V)Z = B(V,Z)U - B(U,Z)V.
NumericTensor brute_q(const NumericTensor& B, const NumericTensor& T);

/// Least squares through the normal equations, solved by Gaussian
/// elimination with partial pivoting. cols[j] is column j.
std::vector<double> normal_equations(const std::vector<std::vector<double>>& cols, const std::vector<double>& rhs);

/// Rank by row reduction; pivots below rel * max(largest entry, reference)
/// count as zero.
int row_rank(std::vector<std::vector<double>> rows, double rel = 1e-8, double reference = 0.0);

/// Every oracle comparison over the built-in catalog, as criterion-13 checks.
std::vector<PropertyOutcome> fd_curvature_checks();
std::vector<PropertyOutcome> derivative_checks();
std::vector<PropertyOutcome> operator_checks();
std::vector<PropertyOutcome> fit_checks();
std::vector<PropertyOutcome> rank_checks();

/// All of the above, ready for ClaimOptions::extra_properties.
std::vector<PropertyCheck> property_checks();

}  // namespace curvkit::oracle

#endif  // CURVKIT_ORACLES_HPP
