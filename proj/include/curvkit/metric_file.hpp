// Metric-definition files (YAML).
//
//   name: melvin
//   dimension: 4
//   coordinates: [t, r, z, phi]
//   signature: [1, 3]
//   parameters: {B0: 1}
//   definitions:            # optional, expanded in place, in order
//     - U = 1 + B0^2*r^2/4
//   components:             # 1-based, symmetric completion is automatic
//     - "1 1 : -U^2"
//   domain: ["r > 0"]
//   exceptional: [r, 4 - B0^2*r^2]
//   samples: {r: [0.5, 1.0], t: [0]}
#ifndef CURVKIT_METRIC_FILE_HPP
#define CURVKIT_METRIC_FILE_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "curvkit/chart.hpp"

namespace curvkit {

class FileNotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural problems in a metric file (missing keys, bad index entries).
/// Expression-level errors surface as ParseError.
class MetricFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MetricSpec parse_metric_text(std::string_view text);
MetricSpec load_metric_file(const std::string& path);

/// Writes a metric file that parse_metric_text reads back to the same metric.
std::string export_metric(const MetricSpec& m);

/// Parses "lhs > rhs" (also >=, <, <=, !=).
DomainPredicate parse_predicate(std::string_view text, const SymbolTable& symbols);

}  // namespace curvkit

#endif  // CURVKIT_METRIC_FILE_HPP
