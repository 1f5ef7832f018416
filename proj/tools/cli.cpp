#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "curvkit/catalog.hpp"
#include "curvkit/metric_file.hpp"
#include "curvkit/report.hpp"

namespace curvkit::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wraps an exception with the exit code it maps to.
struct Failure {
  int code;
  std::string message;
};

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError("bad number '" + s + "' in " + what);
  return v;
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const std::string& what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw UsageError(what + " expects name=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

ParamEnv parse_params(const std::vector<std::string>& items) {
  ParamEnv env;
  for (const auto& item : items) {
    auto [k, v] = split_assignment(item, "--param");
    env[k] = parse_number(v, "--param " + k);
  }
  return env;
}

// coord=start:stop:count, coord=v1,v2,... or coord=v
GridAxis parse_axis(const std::string& item, const std::string& flag) {
  auto [coord, spec] = split_assignment(item, flag);
  GridAxis axis{coord, {}};
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw UsageError(flag + " range must be start:stop:count, got '" + spec + "'");
    const double a = parse_number(parts[0], flag), b = parse_number(parts[1], flag);
    const double c = parse_number(parts[2], flag);
    if (c < 1 || c != std::floor(c)) throw UsageError(flag + " count must be a positive integer");
    const int n = static_cast<int>(c);
    for (int i = 0; i < n; ++i) axis.values.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  } else {
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) axis.values.push_back(parse_number(part, flag));
  }
  return axis;
}

struct Source {
  std::string label;  // "catalog" or the file path
  std::optional<CatalogEntry> entry;
  std::unique_ptr<Geometry> geometry;
  ParamEnv params;
};

Source load_source(const std::string& metric, const std::string& file, const ParamEnv& overrides) {
  Source s;
  if (!file.empty()) {
    MetricSpec m = load_metric_file(file);
    for (const auto& [k, v] : overrides)
      if (!m.parameters.count(k)) throw UsageError("metric file declares no parameter '" + k + "'");
    s.params = m.bind(overrides);
    s.label = file;
    s.geometry = std::make_unique<Geometry>(std::move(m));
    return s;
  }
  try {
    s.entry = lookup(metric, overrides);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  s.params = s.entry->metric.bind(overrides);
  s.label = "catalog";
  s.geometry = make_geometry(*s.entry);
  return s;
}

SampleGrid build_grid(const Source& s, const std::vector<GridAxis>& axes, const Tolerance& tol) {
  const MetricSpec& m = s.geometry->metric();
  for (const auto& a : axes)
    if (m.chart.index_of(a.coordinate) < 0) throw UsageError("grid names unknown coordinate '" + a.coordinate + "'");
  SampleGrid grid = axes.empty() ? default_grid(m, s.params, tol) : make_grid(m, s.params, axes, tol);
  validate_grid(m, grid);
  return grid;
}

std::string format_index(const std::vector<int>& idx) {
  std::string s;
  for (int i : idx) s += std::to_string(i + 1);
  return s;
}

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

// ---------------------------------------------------------------------------

struct Common {
  std::string metric;
  std::string metric_file;
  std::vector<std::string> params;
  double tol = Tolerance{}.rel;
  double abs_floor = Tolerance{}.abs_floor;
  std::string output;
  std::string format = "text";

  Tolerance tolerance() const { return {tol, abs_floor}; }
  std::string metric_name() const { return metric.empty() && metric_file.empty() ? "melvin" : metric; }
};

void add_source_options(CLI::App* cmd, Common& c) {
  auto* m = cmd->add_option("--metric", c.metric, "built-in metric (default melvin); see `curvkit list`");
  auto* f = cmd->add_option("--metric-file", c.metric_file, "metric definition file");
  m->excludes(f);
  cmd->add_option("--param", c.params, "parameter override name=value (repeatable)");
  cmd->add_option("--tol", c.tol, "relative tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--abs-floor", c.abs_floor, "absolute floor")->check(CLI::NonNegativeNumber);
  cmd->add_option("--output", c.output, "write the result to a file instead of stdout");
}

int do_classify(const Common& c, const std::vector<std::string>& grid_items, std::ostream& out) {
  std::vector<GridAxis> axes;
  for (const auto& g : grid_items) axes.push_back(parse_axis(g, "--grid"));
  const Tolerance tol = c.tolerance();
  const Source s = load_source(c.metric_name(), c.metric_file, parse_params(c.params));
  SampledGeometry sg(*s.geometry, build_grid(s, axes, tol));
  const ClassificationReport report = build_report(sg, tol, s.label, s.entry ? &*s.entry : nullptr);
  write_output(c.format == "machine" ? to_machine(report) : to_text(report), c.output, out);
  return kOk;
}

int do_components(const Common& c, const std::string& tensor, const std::vector<std::string>& at_items,
                  std::ostream& out) {
  std::vector<GridAxis> axes;
  for (const auto& a : at_items) {
    GridAxis axis = parse_axis(a, "--at");
    if (axis.values.size() != 1) throw UsageError("--at takes a single value per coordinate");
    axes.push_back(axis);
  }
  const Tolerance tol = c.tolerance();
  const Source s = load_source(c.metric_name(), c.metric_file, parse_params(c.params));
  SampleGrid grid = build_grid(s, axes, tol);
  grid.points.resize(1);
  SampledGeometry sg(*s.geometry, grid);
  const PointGeometry& p = sg[0];

  NumericTensor t;
  try {
    t = named_tensor(p, tensor);
  } catch (const std::out_of_range&) {
    throw UsageError("unknown tensor '" + tensor + "'");
  }

  // Printed entries of the catalog table, keyed by every equivalent index.
  // The parsed expressions stay alive for the whole evaluation: the
  // evaluator memoizes by node address.
  struct Printed {
    const GoldenEntry* entry;
    Expr expr;
  };
  std::vector<Printed> printed;
  std::map<std::vector<int>, std::pair<std::size_t, int>> golden;
  if (s.entry) {
    SymbolTable sym = s.entry->metric.symbols();
    sym.definitions = s.entry->definitions;
    for (const auto& ge : s.entry->golden) {
      if (ge.tensor != tensor) continue;
      printed.push_back({&ge, parse(ge.printed, &sym)});
      std::vector<int> zero(ge.index);
      for (int& i : zero) --i;
      for (const auto& [idx, sign] : symmetry_orbit(ge.tensor, zero))
        golden.emplace(idx, std::make_pair(printed.size() - 1, sign));
    }
  }
  Evaluator ev(p.point, grid.params);
  auto golden_column = [&](const std::vector<int>& idx) -> std::string {
    auto it = golden.find(idx);
    if (it == golden.end()) return "";
    const Printed& pr = printed[it->second.first];
    std::string col = "  printed " + number(it->second.second * ev(pr.expr));
    if (pr.entry->disputed) col += " (disputed)";
    return col;
  };

  std::ostringstream os;
  os << s.geometry->metric().name << " " << tensor << " at (";
  for (std::size_t i = 0; i < p.point.size(); ++i)
    os << (i ? ", " : "") << s.geometry->metric().chart.coordinates[i] << "=" << number(p.point[i]);
  os << ")\n";
  if (t.rank() == 0) {
    os << tensor << "  " << number(t.size() ? t[0] : 0.0) << "\n";
  } else {
    std::size_t shown = 0;
    for_each_index(t.dim(), t.rank(), [&](const MultiIndex& i, std::size_t flat) {
      if (std::fabs(t[flat]) <= tol.abs_floor) return;
      std::vector<int> idx(i.begin(), i.begin() + t.rank());
      os << tensor << "_" << format_index(idx) << "  " << number(t[flat]) << golden_column(idx) << "\n";
      ++shown;
    });
    if (shown == 0) os << "(no components above " << number(tol.abs_floor) << ")\n";
  }
  write_output(os.str(), c.output, out);
  return kOk;
}

int do_verify(const Common& c, int criterion, bool verbose, bool tamper, const Hooks& hooks, std::ostream& out) {
  ClaimOptions options;
  options.tol = c.tolerance();
  options.extra_properties = hooks.extra_properties;
  options.tamper_golden = tamper;
  std::vector<ClaimResult> results;
  if (criterion > 0) {
    if (criterion > kCriterionCount) throw UsageError("no criterion " + std::to_string(criterion));
    results.push_back(run_criterion(criterion, options));
  } else {
    results = run_all(options);
  }
  std::ostringstream os;
  int failed = 0, disputed = 0;
  for (const auto& r : results) {
    os << summary_line(r) << "\n";
    if (verbose || r.status != ClaimStatus::pass)
      for (const auto& d : r.details)
        if (verbose || d.rfind("[ok]", 0) != 0) os << "    " << d << "\n";
    failed += r.status == ClaimStatus::fail;
    disputed += r.status == ClaimStatus::disputed;
  }
  os << results.size() - failed - disputed << " pass, " << disputed << " disputed, " << failed << " fail\n";
  write_output(os.str(), c.output, out);
  return failed ? kClaimFailed : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Curvature-restricted structure classifier", "curvkit"};
  app.set_version_flag("--version", kEngineVersion);
  app.require_subcommand(1);

  Common classify_opts, comp_opts, verify_opts;
  std::vector<std::string> grid_items, at_items;
  std::string tensor;
  int criterion = 0;
  bool verbose = false, tamper = false;

  auto* classify_cmd = app.add_subcommand("classify", "run every structure detector on a metric");
  add_source_options(classify_cmd, classify_opts);
  classify_cmd->add_option("--grid", grid_items, "coord=start:stop:count, coord=v1,v2,... (repeatable)");
  classify_cmd->add_option("--format", classify_opts.format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  auto* comp_cmd = app.add_subcommand("components", "print the nonzero components of a tensor at one point");
  add_source_options(comp_cmd, comp_opts);
  comp_cmd->add_option("--tensor", tensor, "g, Gamma, R, S, kappa, C, nablaC, RdotR, QgR, RF, ...")->required();
  comp_cmd->add_option("--at", at_items, "coord=value (repeatable); other coordinates take their defaults");

  auto* verify_cmd = app.add_subcommand("verify-paper", "run the acceptance claims");
  verify_cmd->add_option("--tol", verify_opts.tol, "detector relative tolerance")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--abs-floor", verify_opts.abs_floor, "absolute floor")->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--criterion", criterion, "run a single criterion");
  verify_cmd->add_option("--output", verify_opts.output, "write the summary to a file");
  verify_cmd->add_flag("-v,--verbose", verbose, "print every check");
  verify_cmd->add_flag("--tamper-golden", tamper, "perturb one printed table entry (harness self-test)")
      ->group("");

  auto* list_cmd = app.add_subcommand("list", "list the built-in metrics");

  std::vector<const char*> argv{"curvkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*list_cmd) {
      for (const auto& n : catalog_names()) out << n << "\n";
      return kOk;
    }
    if (*classify_cmd) return do_classify(classify_opts, grid_items, out);
    if (*comp_cmd) return do_components(comp_opts, tensor, at_items, out);
    if (*verify_cmd) return do_verify(verify_opts, criterion, verbose, tamper, hooks, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const FileNotFoundError& e) {
    err << "file not found: " << e.what() << "\n";
    return kFileNotFound;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const MetricFileError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const UnboundSymbolError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const DegenerateMetricError& e) {
    err << "degenerate metric: " << e.what() << "\n";
    return kDegenerate;
  } catch (const EmptyGridError& e) {
    err << "empty grid: " << e.what() << "\n";
    return kEmptyGrid;
  } catch (const std::invalid_argument& e) {
    // Chart and signature checks while building a metric from a file.
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kClaimFailed;
  }
  return kUsage;
}

}  // namespace curvkit::cli
