// Classification reports: what `curvkit classify` prints.
//
// The machine format is a YAML document with a fixed key order and doubles
// written with 17 significant digits, so parse(serialize(r)) == r and two
// runs on the same input produce identical bytes.
#ifndef CURVKIT_REPORT_HPP
#define CURVKIT_REPORT_HPP

#include <string>
#include <string_view>
#include <vector>

#include "curvkit/catalog.hpp"
#include "curvkit/classifier.hpp"

namespace curvkit {

inline constexpr const char* kEngineVersion = "curvkit 1.0.0";

struct DetectorSummary {
  std::string name;
  Verdict verdict = Verdict::vacuous;
  double max_residual = 0.0;
  int nullspace_dim = 0;
  int order = -1;
  std::size_t worst_point = 0;
  std::vector<int> worst_index;  // 1-based
  std::string note;
  std::vector<std::string> coefficient_names;
  /// coefficients[p][k] is coefficient k at grid point p.
  std::vector<std::vector<double>> coefficients;
  std::vector<double> residuals;
  std::vector<Verdict> point_verdicts;

  friend bool operator==(const DetectorSummary&, const DetectorSummary&);
};

struct GoldenSummary {
  std::string tensor;
  std::vector<int> index;  // 1-based
  GoldenStatus status = GoldenStatus::match;
  double max_error = 0.0;
  std::string note;

  friend bool operator==(const GoldenSummary&, const GoldenSummary&);
};

struct ClassificationReport {
  std::string engine_version = kEngineVersion;
  std::string metric;
  std::string source;  // "catalog" or the metric file path
  std::vector<std::string> coordinates;
  std::vector<std::pair<std::string, double>> parameters;
  Tolerance tol;
  std::string grid_description;
  std::vector<std::vector<double>> points;
  std::vector<DetectorSummary> detectors;
  std::vector<GoldenSummary> golden;
  std::vector<std::pair<std::string, std::vector<int>>> unlisted;

  const DetectorSummary* find(std::string_view detector) const;

  friend bool operator==(const ClassificationReport&, const ClassificationReport&);
};

DetectorSummary summarize(const FitResult& fit);
std::vector<GoldenSummary> summarize(const GoldenReport& golden);

/// Runs every detector on the sampled geometry (and the golden comparison
/// when `entry` is given).
ClassificationReport build_report(const SampledGeometry& sg, const Tolerance& tol, const std::string& source,
                                  const CatalogEntry* entry = nullptr);

std::string to_machine(const ClassificationReport& report);
ClassificationReport parse_report(std::string_view text);
std::string to_text(const ClassificationReport& report);

}  // namespace curvkit

#endif  // CURVKIT_REPORT_HPP
