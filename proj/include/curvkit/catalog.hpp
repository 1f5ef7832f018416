// Built-in metrics: the Melvin magnetic spacetime, the Melvin-type family in
// Weyl form, and its 3-dimensional base, each with printed component tables.
//
// Golden entries are written against the symbols f, fp, fpp, fppp (f and its
// r-derivatives) and r, and use 1-based indices. Entries whose printed form
// disagrees with a direct computation carry `disputed` and, when the
// discrepancy is understood, a `corrected` expression.
#ifndef CURVKIT_CATALOG_HPP
#define CURVKIT_CATALOG_HPP

#include <memory>
#include <string>
#include <vector>

#include "curvkit/curvature.hpp"
#include "curvkit/sampled.hpp"

namespace curvkit {

struct GoldenEntry {
  std::string tensor;      // named_tensor() name
  std::vector<int> index;  // 1-based
  std::string printed;
  bool disputed = false;
  /// Magnitude agrees, sign does not.
  bool sign_only = false;
  std::string corrected;
  std::string note;
};

struct ExtraField {
  std::string name;
  SymbolicTensor tensor;
  Symmetry symmetry = Symmetry::none;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  MetricSpec metric;
  std::vector<ExtraField> fields;
  /// Symbols available to golden expressions (f, fp, fpp, fppp, U, ...).
  std::map<std::string, Expr> definitions;
  std::vector<GoldenEntry> golden;
};

/// r values of every built-in sample grid; t, z, phi are held at 0.
const std::vector<double>& default_radii();

/// ds^2 = U^2 (-dt^2 + dr^2 + dz^2) + r^2/U^2 dphi^2, U = 1 + B0^2 r^2 / 4,
/// with the Maxwell field F_24 = 8 B0 r / (4 + B0^2 r^2)^2.
CatalogEntry melvin(double B0 = 1.0);

struct MelvinTypeOptions {
  /// Exclude the zero set of r f'' - 2 r f'^2 + 2 f' (where C vanishes).
  bool exclude_conformally_flat_locus = true;
  ParamEnv parameters;
};

/// ds^2 = e^{2f(r)} (-dt^2 + dr^2 + dz^2) + r^2 e^{-2f(r)} dphi^2.
CatalogEntry melvin_type(const std::string& f_source, const MelvinTypeOptions& options = {});

/// -g_11 = g_22 = g_33 = e^{2f(r)} on (t, r, z).
CatalogEntry base_3metric(const std::string& f_source, const ParamEnv& parameters = {});

/// Names accepted by lookup(), in display order.
std::vector<std::string> catalog_names();

/// A built-in entry by name. Also accepts "melvin_type:<f>" and
/// "base_3metric:<f>" for an arbitrary f(r). Parameter overrides replace the
/// entry's defaults (B0 for melvin). Throws std::out_of_range if unknown.
CatalogEntry lookup(const std::string& name, const ParamEnv& overrides = {});

/// Builds the symbolic pipeline and registers the entry's extra fields.
std::unique_ptr<Geometry> make_geometry(const CatalogEntry& entry);

// ---------------------------------------------------------------------------
// Golden comparison

enum class GoldenStatus { match, disputed, mismatch };

std::string to_string(GoldenStatus s);
GoldenStatus golden_status_from_string(const std::string& s);

struct GoldenOutcome {
  std::string tensor;
  std::vector<int> index;
  std::string printed;
  GoldenStatus status = GoldenStatus::match;
  /// Printed form agrees with the engine (up to sign when sign_only).
  bool printed_matches = false;
  bool sign_only = false;
  /// Largest |engine - printed| / scale over the grid.
  double max_error = 0.0;
  std::size_t worst_point = 0;
  std::string note;
};

struct GoldenReport {
  std::vector<GoldenOutcome> outcomes;
  /// Components above tolerance that no printed entry covers up to symmetry
  /// (1-based).
  std::vector<std::pair<std::string, std::vector<int>>> unlisted;
  std::size_t count(GoldenStatus s) const;
};

/// Compares every golden entry at every grid point. The scale of a
/// comparison is the largest component of the tensor at that point (or the
/// Ricci operator for scalars); entries agree when
/// |engine - expr| <= max(rel * scale, abs_floor).
GoldenReport golden_check(const CatalogEntry& entry, const SampledGeometry& sg, double rel = 1e-10,
                          double abs_floor = 1e-12);

/// Every index tuple equivalent to `index` under the symmetries of the named
/// tensor, with the sign relating the two components (0-based).
std::vector<std::pair<std::vector<int>, int>> symmetry_orbit(const std::string& tensor, const std::vector<int>& index);

}  // namespace curvkit

#endif  // CURVKIT_CATALOG_HPP
