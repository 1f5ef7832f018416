#include "curvkit/report.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace curvkit {

namespace {

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

std::vector<int> one_based(std::vector<int> idx) {
  for (int& i : idx) ++i;
  return idx;
}

std::string index_string(const std::vector<int>& idx) {
  std::string s;
  for (int i : idx) s += std::to_string(i);
  return s;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// yaml-cpp writes NaN and infinities as .nan / .inf; read them back the same way.
double as_double(const YAML::Node& n) {
  const std::string s = n.as<std::string>();
  if (s == ".nan" || s == ".NaN" || s == ".NAN") return std::nan("");
  if (s == ".inf" || s == "+.inf") return HUGE_VAL;
  if (s == "-.inf") return -HUGE_VAL;
  return n.as<double>();
}

std::vector<double> doubles(const YAML::Node& n) {
  std::vector<double> out;
  for (const auto& x : n) out.push_back(as_double(x));
  return out;
}

std::vector<int> ints(const YAML::Node& n) {
  std::vector<int> out;
  for (const auto& x : n) out.push_back(x.as<int>());
  return out;
}

void emit_doubles(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

void emit_ints(YAML::Emitter& out, const std::vector<int>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (int x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace

bool operator==(const DetectorSummary& a, const DetectorSummary& b) {
  if (a.coefficients.size() != b.coefficients.size()) return false;
  for (std::size_t p = 0; p < a.coefficients.size(); ++p)
    if (!same(a.coefficients[p], b.coefficients[p])) return false;
  return a.name == b.name && a.verdict == b.verdict && same(a.max_residual, b.max_residual) &&
         a.nullspace_dim == b.nullspace_dim && a.order == b.order && a.worst_point == b.worst_point &&
         a.worst_index == b.worst_index && a.note == b.note && a.coefficient_names == b.coefficient_names &&
         same(a.residuals, b.residuals) && a.point_verdicts == b.point_verdicts;
}

bool operator==(const GoldenSummary& a, const GoldenSummary& b) {
  return a.tensor == b.tensor && a.index == b.index && a.status == b.status && same(a.max_error, b.max_error) &&
         a.note == b.note;
}

bool operator==(const ClassificationReport& a, const ClassificationReport& b) {
  if (a.points.size() != b.points.size() || a.parameters.size() != b.parameters.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (!same(a.points[i], b.points[i])) return false;
  for (std::size_t i = 0; i < a.parameters.size(); ++i)
    if (a.parameters[i].first != b.parameters[i].first || !same(a.parameters[i].second, b.parameters[i].second))
      return false;
  return a.engine_version == b.engine_version && a.metric == b.metric && a.source == b.source &&
         a.coordinates == b.coordinates && same(a.tol.rel, b.tol.rel) && same(a.tol.abs_floor, b.tol.abs_floor) &&
         a.grid_description == b.grid_description && a.detectors == b.detectors && a.golden == b.golden &&
         a.unlisted == b.unlisted;
}

const DetectorSummary* ClassificationReport::find(std::string_view detector) const {
  for (const auto& d : detectors)
    if (d.name == detector) return &d;
  return nullptr;
}

DetectorSummary summarize(const FitResult& fit) {
  DetectorSummary d;
  d.name = fit.name;
  d.verdict = fit.verdict;
  d.max_residual = fit.max_residual();
  d.nullspace_dim = fit.nullspace_dim;
  d.order = fit.order;
  d.worst_point = fit.worst_point;
  d.worst_index = one_based(fit.worst_index);
  d.note = fit.note;
  d.coefficient_names = fit.coefficient_names;
  for (const auto& c : fit.coefficients) d.coefficients.emplace_back(c.data(), c.data() + c.size());
  d.residuals = fit.residuals;
  d.point_verdicts = fit.point_verdicts;
  return d;
}

std::vector<GoldenSummary> summarize(const GoldenReport& golden) {
  std::vector<GoldenSummary> out;
  for (const auto& o : golden.outcomes) out.push_back({o.tensor, o.index, o.status, o.max_error, o.note});
  return out;
}

ClassificationReport build_report(const SampledGeometry& sg, const Tolerance& tol, const std::string& source,
                                  const CatalogEntry* entry) {
  const MetricSpec& m = sg.geometry().metric();
  ClassificationReport r;
  r.metric = m.name;
  r.source = source;
  r.coordinates = m.chart.coordinates;
  for (const auto& [k, v] : sg.grid().params) r.parameters.emplace_back(k, v);
  r.tol = tol;
  r.grid_description = sg.grid().description;
  r.points = sg.grid().points;
  for (const auto& fit : classify(sg, tol)) r.detectors.push_back(summarize(fit));
  if (entry && !entry->golden.empty()) {
    const GoldenReport g = golden_check(*entry, sg, 1e-10, tol.abs_floor);
    r.golden = summarize(g);
    r.unlisted = g.unlisted;
  }
  return r;
}

std::string to_machine(const ClassificationReport& r) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "engine" << YAML::Value << r.engine_version;
  out << YAML::Key << "metric" << YAML::Value << r.metric;
  out << YAML::Key << "source" << YAML::Value << r.source;
  out << YAML::Key << "coordinates" << YAML::Value << YAML::Flow << r.coordinates;
  out << YAML::Key << "parameters" << YAML::Value << YAML::BeginSeq;
  for (const auto& [k, v] : r.parameters)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << k << YAML::Key << "value"
        << YAML::Value << v << YAML::EndMap;
  out << YAML::EndSeq;
  out << YAML::Key << "tolerance" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "rel"
      << YAML::Value << r.tol.rel << YAML::Key << "abs_floor" << YAML::Value << r.tol.abs_floor << YAML::EndMap;
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "description" << YAML::Value << r.grid_description;
  out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : r.points) emit_doubles(out, p);
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "detectors" << YAML::Value << YAML::BeginSeq;
  for (const auto& d : r.detectors) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << d.name;
    out << YAML::Key << "verdict" << YAML::Value << to_string(d.verdict);
    out << YAML::Key << "max_residual" << YAML::Value << d.max_residual;
    out << YAML::Key << "nullspace_dim" << YAML::Value << d.nullspace_dim;
    out << YAML::Key << "order" << YAML::Value << d.order;
    out << YAML::Key << "worst_point" << YAML::Value << d.worst_point;
    out << YAML::Key << "worst_index" << YAML::Value;
    emit_ints(out, d.worst_index);
    out << YAML::Key << "note" << YAML::Value << d.note;
    out << YAML::Key << "coefficient_names" << YAML::Value << YAML::Flow << d.coefficient_names;
    out << YAML::Key << "coefficients" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : d.coefficients) emit_doubles(out, c);
    out << YAML::EndSeq;
    out << YAML::Key << "residuals" << YAML::Value;
    emit_doubles(out, d.residuals);
    out << YAML::Key << "point_verdicts" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Verdict v : d.point_verdicts) out << to_string(v);
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "golden" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : r.golden) {
    out << YAML::BeginMap;
    out << YAML::Key << "tensor" << YAML::Value << g.tensor;
    out << YAML::Key << "index" << YAML::Value;
    emit_ints(out, g.index);
    out << YAML::Key << "status" << YAML::Value << to_string(g.status);
    out << YAML::Key << "max_error" << YAML::Value << g.max_error;
    out << YAML::Key << "note" << YAML::Value << g.note;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "unlisted" << YAML::Value << YAML::BeginSeq;
  for (const auto& [name, idx] : r.unlisted) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "tensor" << YAML::Value << name << YAML::Key << "index"
        << YAML::Value;
    emit_ints(out, idx);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ClassificationReport parse_report(std::string_view text) {
  const YAML::Node root = YAML::Load(std::string(text));
  ClassificationReport r;
  r.engine_version = root["engine"].as<std::string>();
  r.metric = root["metric"].as<std::string>();
  r.source = root["source"].as<std::string>();
  r.coordinates = root["coordinates"].as<std::vector<std::string>>();
  for (const auto& p : root["parameters"]) r.parameters.emplace_back(p["name"].as<std::string>(), as_double(p["value"]));
  r.tol.rel = as_double(root["tolerance"]["rel"]);
  r.tol.abs_floor = as_double(root["tolerance"]["abs_floor"]);
  r.grid_description = root["grid"]["description"].as<std::string>();
  for (const auto& p : root["grid"]["points"]) r.points.push_back(doubles(p));
  for (const auto& n : root["detectors"]) {
    DetectorSummary d;
    d.name = n["name"].as<std::string>();
    d.verdict = verdict_from_string(n["verdict"].as<std::string>());
    d.max_residual = as_double(n["max_residual"]);
    d.nullspace_dim = n["nullspace_dim"].as<int>();
    d.order = n["order"].as<int>();
    d.worst_point = n["worst_point"].as<std::size_t>();
    d.worst_index = ints(n["worst_index"]);
    d.note = n["note"].as<std::string>("");
    d.coefficient_names = n["coefficient_names"].as<std::vector<std::string>>();
    for (const auto& c : n["coefficients"]) d.coefficients.push_back(doubles(c));
    d.residuals = doubles(n["residuals"]);
    for (const auto& v : n["point_verdicts"]) d.point_verdicts.push_back(verdict_from_string(v.as<std::string>()));
    r.detectors.push_back(std::move(d));
  }
  for (const auto& n : root["golden"]) {
    GoldenSummary g;
    g.tensor = n["tensor"].as<std::string>();
    g.index = ints(n["index"]);
    g.status = golden_status_from_string(n["status"].as<std::string>());
    g.max_error = as_double(n["max_error"]);
    g.note = n["note"].as<std::string>("");
    r.golden.push_back(std::move(g));
  }
  for (const auto& n : root["unlisted"]) r.unlisted.emplace_back(n["tensor"].as<std::string>(), ints(n["index"]));
  return r;
}

std::string to_text(const ClassificationReport& r) {
  std::ostringstream os;
  os << "metric   " << r.metric << " (" << r.source << ")\n";
  os << "chart    ";
  for (std::size_t i = 0; i < r.coordinates.size(); ++i) os << (i ? ", " : "") << r.coordinates[i];
  os << "\n";
  if (!r.parameters.empty()) {
    os << "params  ";
    for (const auto& [k, v] : r.parameters) os << " " << k << "=" << number(v);
    os << "\n";
  }
  os << "grid     " << r.points.size() << " points, " << r.grid_description << "\n";
  os << "tol      rel " << number(r.tol.rel) << ", abs floor " << number(r.tol.abs_floor) << "\n\n";

  // Coefficients are shown at the first grid point.
  for (const auto& d : r.detectors) {
    char line[160];
    std::snprintf(line, sizeof line, "%-48s %-14s res %.2e", d.name.c_str(), to_string(d.verdict).c_str(),
                  d.max_residual);
    os << line;
    if (d.order >= 0) os << "  order " << d.order;
    if (d.nullspace_dim > 0) os << "  null " << d.nullspace_dim;
    if (d.verdict == Verdict::holds && !d.coefficients.empty()) {
      os << "  @(";
      for (std::size_t i = 0; i < r.points.at(0).size(); ++i) os << (i ? "," : "") << number(r.points[0][i]);
      os << "):";
      for (std::size_t k = 0; k < d.coefficient_names.size(); ++k)
        os << " " << d.coefficient_names[k] << "=" << number(d.coefficients[0][k]);
    }
    if (d.verdict == Verdict::fails && !d.worst_index.empty())
      os << "  worst point " << d.worst_point << " index " << index_string(d.worst_index);
    if (!d.note.empty()) os << "  [" << d.note << "]";
    os << "\n";
  }
  if (!r.golden.empty()) {
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& g : r.golden) ++counts[static_cast<int>(g.status)];
    os << "\ngolden   " << counts[0] << " match, " << counts[1] << " disputed, " << counts[2] << " mismatch\n";
    for (const auto& g : r.golden) {
      if (g.status == GoldenStatus::match) continue;
      os << "  " << to_string(g.status) << " " << g.tensor << " " << index_string(g.index);
      if (!g.note.empty()) os << "  " << g.note;
      os << "\n";
    }
    for (const auto& [name, idx] : r.unlisted) os << "  unlisted " << name << " " << index_string(idx) << "\n";
  }
  return os.str();
}

}  // namespace curvkit
