#include "curvkit/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace curvkit {

namespace {

struct Row {
  const char* tensor;
  const char* index;
  const char* printed;
};

std::vector<int> parse_index(const char* s) {
  std::vector<int> out;
  std::istringstream is(s);
  int i;
  while (is >> i) out.push_back(i);
  return out;
}

std::vector<GoldenEntry> rows_to_entries(std::initializer_list<Row> rows) {
  std::vector<GoldenEntry> out;
  for (const auto& r : rows) out.push_back({r.tensor, parse_index(r.index), r.printed, false, false, "", ""});
  return out;
}

GoldenEntry& find_entry(std::vector<GoldenEntry>& table, const std::string& tensor, const char* index) {
  const auto idx = parse_index(index);
  for (auto& e : table)
    if (e.tensor == tensor && e.index == idx) return e;
  throw std::logic_error("no golden entry " + tensor + " " + index);
}

void dispute(std::vector<GoldenEntry>& table, const std::string& tensor, const char* index, std::string corrected,
             std::string note) {
  auto& e = find_entry(table, tensor, index);
  e.disputed = true;
  e.corrected = std::move(corrected);
  e.note = std::move(note);
}

void dispute_sign(std::vector<GoldenEntry>& table, const std::string& tensor, const char* index, std::string note) {
  auto& e = find_entry(table, tensor, index);
  e.disputed = true;
  e.sign_only = true;
  e.corrected = "-(" + e.printed + ")";
  e.note = std::move(note);
}

// Printed components of the 3-dimensional base (t, r, z).
std::vector<GoldenEntry> base_table() {
  return rows_to_entries({
      {"R", "1 2 1 2", "exp(2*f)*fpp"},
      {"R", "2 3 2 3", "-exp(2*f)*fpp"},
      {"R", "1 3 1 3", "exp(2*f)*fp^2"},
      {"S", "1 1", "-(fp^2 + fpp)"},
      {"S", "3 3", "fp^2 + fpp"},
      {"S", "2 2", "2*fpp"},
      {"kappa", "", "2*exp(-2*f)*(fp^2 + 2*fpp)"},
      {"K", "1 2 1 2", "-exp(2*f)*(fp^2 + 2*fpp)"},
      {"K", "1 3 1 3", "-exp(2*f)*(fp^2 + 2*fpp)"},
      {"K", "2 3 2 3", "exp(2*f)*(fp^2 + 2*fpp)"},
      {"nablaK", "1 2 1 2 2", "2*exp(2*f)*(fp^3 + fp*fpp - fppp)"},
      {"nablaK", "1 3 1 3 2", "2*exp(2*f)*(fp^3 + fp*fpp - fppp)"},
      {"nablaK", "2 3 2 3 2", "-2*exp(2*f)*(fp^3 + fp*fpp - fppp)"},
      {"RdotR", "1 3 2 3 1 2", "-exp(2*f)*fpp*(fp^2 - fpp)"},
      {"RdotR", "1 2 1 3 2 3", "exp(2*f)*fpp*(fp^2 - fpp)"},
      {"QgR", "1 3 2 3 1 2", "-exp(4*f)*(fp^2 - fpp)"},
      {"QgR", "1 2 1 3 2 3", "exp(4*f)*(fp^2 - fpp)"},
  });
}

// Printed components of the Melvin-type metric (t, r, z, phi). Chained
// equalities are unrolled into one entry per component.
std::vector<GoldenEntry> melvin_type_table() {
  // C_1212, C_1313,2, C_1213,3, r^2 e^{-4f} (C.C)_132312, r^2 e^{-4f} Q(g,C)_132312
  const std::string X = "(exp(2*f)/(3*r)*(r*fpp - 2*r*fp^2 + 2*fp))";
  const std::string Y = "(2*exp(2*f)/(3*r^2)*(2*r*fp*(2*fp - 2*r*fp^2 + 3*r*fpp) + (2*fp - 2*r*fpp - r^2*fppp)))";
  const std::string Z = "(exp(2*f)/r*fp*(2*fp - 2*r*fp^2 + r*fpp))";
  const std::string W = "(exp(-2*f)/3*(2*fp - 2*r*fp^2 + r*fpp)^2)";
  const std::string V = "(r*(2*fp - 2*r*fp^2 + r*fpp))";
  const std::string rr = "(-exp(-2*f)*(3*fp - 2*r*fp^2 + r*fpp)*(fp - r*fp^2 - r*fpp))";

  std::vector<GoldenEntry> t = rows_to_entries({
      {"R", "1 3 1 3", "exp(2*f)*fp^2"},
      {"R", "1 2 1 2", "exp(2*f)*fpp"},
      {"R", "2 3 2 3", "-exp(2*f)*fpp"},
      {"R", "1 4 1 4", "exp(-2*f)*r*fp*(1 - r*fp)"},
      {"R", "3 4 3 4", "-exp(-2*f)*r*fp*(1 - r*fp)"},
      {"R", "2 4 2 4", "exp(-2*f)*r*(3*fp - 2*r*fp^2 + r*fpp)"},
      {"S", "1 1", "-(fp + r*fpp)/r"},
      {"S", "3 3", "(fp + r*fpp)/r"},
      {"S", "2 2", "-(3*fp - 2*r*fp^2 - r*fpp)/r"},
      {"S", "4 4", "exp(-4*f)*r*(fp + r*fpp)"},
      {"kappa", "", "2*exp(-2*f)/r*(r*fpp + r*fp^2 - fp)"},
      {"RdotR", "1 3 2 3 1 2", "-exp(2*f)*fpp*(fp^2 - fpp)"},
      {"RdotR", "1 2 1 3 2 3", "exp(2*f)*fpp*(fp^2 - fpp)"},
      {"RdotR", "1 4 2 4 1 2", "-exp(-2*f)*r*fpp*(4*fp - 3*r*fp^2 + r*fpp)"},
      {"RdotR", "2 4 3 4 2 3", "-exp(-2*f)*r*fpp*(4*fp - 3*r*fp^2 + r*fpp)"},
      {"RdotR", "1 3 3 4 1 4", "-exp(-2*f)*fp^2*(1 - r*fp)*(1 - 2*r*fp)"},
      {"RdotR", "1 3 1 4 3 4", "exp(-2*f)*fp^2*(1 - r*fp)*(1 - 2*r*fp)"},
      {"RdotR", "1 2 2 4 1 4", "exp(-2*f)*fp*(1 - r*fp)*(3*fp - 2*r*fp^2 + 2*r*fpp)"},
      {"RdotR", "2 3 2 4 3 4", "exp(-2*f)*fp*(1 - r*fp)*(3*fp - 2*r*fp^2 + 2*r*fpp)"},
      {"QgR", "1 3 2 3 1 2", "-exp(4*f)*(fp^2 - fpp)"},
      {"QgR", "1 2 1 3 2 3", "exp(4*f)*(fp^2 - fpp)"},
      {"QgR", "1 4 2 4 1 2", "-r*(4*fp - 3*r*fp^2 + r*fpp)"},
      {"QgR", "2 4 3 4 2 3", "-r*(4*fp - 3*r*fp^2 + r*fpp)"},
      {"QgR", "1 3 3 4 1 4", "-r*fp*(1 - 2*r*fp)"},
      {"QgR", "1 3 1 4 3 4", "-r*fp*(1 - 2*r*fp)"},
      {"QgR", "1 2 2 4 1 4", "r*(3*fp - 2*r*fp^2 + 2*r*fpp)"},
      {"QgR", "2 3 2 4 3 4", "r*(3*fp - 2*r*fp^2 + 2*r*fpp)"},
      {"QgR", "1 2 1 4 2 4", "r*(fp - r*fp^2 - r*fpp)"},
      {"QgR", "2 3 3 4 2 4", "r*(fp - r*fp^2 - r*fpp)"},
      {"QSR", "1 3 2 3 1 2", "exp(2*f)/r*(fp^3*(3 - 2*r*fp) + fpp*(fp - r*fp + r*fpp))"},
      {"QSR", "1 2 1 3 2 3", "-exp(2*f)/r*(fp^3*(3 - 2*r*fp) + fpp*(fp - r*fp + r*fpp))"},
      {"QSR", "1 4 2 4 1 2", "-exp(-2*f)*r*(fp^3*(3 - 2*r*fp) + fpp*(5*fp - 3*r*fp^2 + r*fpp))"},
      {"QSR", "2 4 3 4 2 3", "-exp(-2*f)*r*(fp^3*(3 - 2*r*fp) + fpp*(5*fp - 3*r*fp^2 + r*fpp))"},
      {"QSR", "1 3 3 4 1 4", "exp(-2*f)*fp*(fp + r*fpp)"},
      {"QSR", "1 3 1 4 3 4", "-exp(-2*f)*fp*(fp + r*fpp)"},
      {"QSR", "1 2 2 4 1 4", "exp(-2*f)*fp*(3 - 2*r*fp)*(fp + r*fpp)"},
      {"QSR", "2 3 2 4 3 4", "exp(-2*f)*fp*(3 - 2*r*fp)*(fp + r*fpp)"},
  });
  auto add = [&](const char* tensor, const char* index, const std::string& printed) {
    t.push_back({tensor, parse_index(index), printed, false, false, "", ""});
  };
  add("RdotR", "1 2 1 4 2 4", rr);
  add("RdotR", "2 3 3 4 2 4", rr);
  add("QSR", "1 2 1 4 2 4", rr);
  add("QSR", "2 3 3 4 2 4", rr);

  add("C", "1 2 1 2", X);
  add("C", "1 3 1 3", "-" + X + "/2");
  add("C", "1 4 1 4", "r^2*exp(4*f)*" + X);
  add("C", "2 3 2 3", "-" + X);
  add("C", "2 4 2 4", "r^2*exp(4*f)*" + X + "/2");
  add("C", "3 4 3 4", "-r^2*exp(4*f)*" + X);

  add("nablaC", "1 3 1 3 2", Y);
  add("nablaC", "1 2 1 2 2", "-" + Y + "/2");
  add("nablaC", "1 4 1 4 2", "-r^2*exp(-4*f)*" + Y + "/2");
  add("nablaC", "2 3 2 3 2", Y + "/2");
  add("nablaC", "2 4 2 4 3", "-exp(-4*f)*" + Y + "/2");
  add("nablaC", "3 4 3 4 2", "-exp(-4*f)*" + Y);
  add("nablaC", "1 2 1 3 3", Z);
  add("nablaC", "1 3 2 3 1", Z);
  add("nablaC", "1 4 2 4 1", "-r^2*exp(-4*f)*" + Z);
  add("nablaC", "2 4 3 4 3", "r^2*exp(-4*f)*" + Z);

  add("CdotC", "1 3 2 3 1 2", "exp(4*f)/r^2*" + W);
  add("CdotC", "1 4 2 4 1 2", "-" + W);
  add("CdotC", "1 2 2 4 1 4", W);
  add("CdotC", "1 3 3 4 1 4", "-" + W);
  add("CdotC", "1 2 1 3 2 3", "-exp(4*f)/r^2*" + W);
  add("CdotC", "2 4 3 4 2 3", "-" + W);
  add("CdotC", "1 3 1 4 3 4", W);
  add("CdotC", "2 3 2 4 3 4", W);

  add("QgC", "1 3 2 3 1 2", "exp(4*f)/r^2*" + V);
  add("QgC", "1 4 2 4 1 2", "-" + V);
  add("QgC", "1 2 1 3 2 3", "-exp(4*f)/r^2*" + V);
  add("QgC", "1 3 3 4 1 4", V);
  add("QgC", "1 2 2 4 1 4", "-" + V);
  add("QgC", "1 3 1 4 3 4", "-" + V);
  add("QgC", "2 4 3 4 2 3", V);
  add("QgC", "2 3 2 4 3 4", "-" + V);

  dispute_sign(t, "S", "4 4", "computed S_44 has the opposite sign");
  dispute(t, "C", "1 3 1 3", "-2*" + X, "chain reversed: C_1313 = -2 C_1212");
  dispute(t, "C", "1 4 1 4", "r^2*exp(-4*f)*" + X, "factor is r^2 e^{-4f}, not r^2 e^{4f}");
  dispute(t, "C", "2 4 2 4", "2*r^2*exp(-4*f)*" + X, "factor is 2 r^2 e^{-4f}");
  dispute(t, "C", "3 4 3 4", "-r^2*exp(-4*f)*" + X, "factor is -r^2 e^{-4f}");
  dispute(t, "nablaC", "2 4 2 4 3", "0",
          "component vanishes; the nonzero one is C_2424,2 = -r^2 e^{-4f} C_1313,2");
  dispute(t, "nablaC", "3 4 3 4 2", "r^2*exp(-4*f)*" + Y + "/2", "factor is r^2 e^{-4f}/2");
  dispute_sign(t, "QgR", "1 3 1 4 3 4", "equals -Q(g,R)_133414");
  dispute(t, "QSR", "1 3 2 3 1 2", "exp(2*f)/r*(fp^3*(3 - 2*r*fp) + fpp*(fp - r*fp^2 + r*fpp))",
          "r f' inside the second bracket should be r f'^2");
  dispute(t, "QSR", "1 2 1 3 2 3", "-exp(2*f)/r*(fp^3*(3 - 2*r*fp) + fpp*(fp - r*fp^2 + r*fpp))",
          "r f' inside the second bracket should be r f'^2");
  dispute_sign(t, "QSR", "1 3 3 4 1 4", "computed value has the opposite sign");
  dispute_sign(t, "QSR", "1 3 1 4 3 4", "computed value has the opposite sign");
  for (const char* idx : {"1 3 3 4 1 4", "1 2 2 4 1 4", "1 3 1 4 3 4", "2 4 3 4 2 3", "2 3 2 4 3 4"})
    dispute_sign(t, "QgC", idx, "sign in the printed chain is reversed");
  return t;
}

const char* kCoordinates4[] = {"t", "r", "z", "phi"};

SymbolTable symbols_for(const std::vector<std::string>& coords, const ParamEnv& params) {
  SymbolTable s;
  s.coordinates = coords;
  for (const auto& [k, v] : params) s.parameters.push_back(k);
  return s;
}

// f and its first three r-derivatives, for golden expressions.
std::map<std::string, Expr> f_definitions(const Expr& f, int r_index) {
  std::map<std::string, Expr> d;
  d["f"] = f;
  d["fp"] = simplify(differentiate(f, "r", r_index));
  d["fpp"] = simplify(differentiate(d["fp"], "r", r_index));
  d["fppp"] = simplify(differentiate(d["fpp"], "r", r_index));
  return d;
}

Expr parse_profile(const std::string& source, const SymbolTable& symbols) {
  Expr f = parse(source, &symbols);
  for (std::size_t i = 0; i < symbols.coordinates.size(); ++i) {
    if (symbols.coordinates[i] == "r") continue;
    if (!simplify(differentiate(f, symbols.coordinates[i], static_cast<int>(i))).is_zero()) {
      throw std::invalid_argument("profile f must depend on r only: " + source);
    }
  }
  return f;
}

void set_samples(MetricSpec& m) {
  for (int i = 0; i < m.dim(); ++i) m.samples[i] = {0.0};
  m.samples[m.chart.index_of("r")] = default_radii();
}

}  // namespace

const std::vector<double>& default_radii() {
  static const std::vector<double> r{0.5, 0.8, 1.0, 1.3, 1.7, 2.5, 3.0, 4.0};
  return r;
}

CatalogEntry melvin(double B0) {
  if (!(B0 >= 0.0)) throw std::invalid_argument("melvin: B0 must be non-negative");
  const ParamEnv params{{"B0", B0}};
  Chart chart{{kCoordinates4, kCoordinates4 + 4}};
  MetricSpec m("melvin", chart, Signature{1, 3}, params);
  SymbolTable sym = m.symbols();
  const Expr U = parse("1 + B0^2*r^2/4", &sym);
  sym.definitions["U"] = U;
  m.set_component(0, 0, parse("-U^2", &sym));
  m.set_component(1, 1, parse("U^2", &sym));
  m.set_component(2, 2, parse("U^2", &sym));
  m.set_component(3, 3, parse("r^2/U^2", &sym));
  m.domain.push_back({parse("r", &sym), Relation::greater, Expr(0.0)});
  m.exceptional = {parse("r", &sym), parse("4 - B0^2*r^2", &sym)};
  set_samples(m);

  CatalogEntry e{"melvin", "Melvin magnetic universe", std::move(m), {}, {}, {}};
  SymbolicTensor F(4, 2);
  const Expr f24 = parse("8*B0*r/(4 + B0^2*r^2)^2", &sym);
  F(1, 3) = f24;
  F(3, 1) = -f24;
  e.fields.push_back({"F", F, Symmetry::antisymmetric});

  e.definitions = f_definitions(parse("ln(1 + B0^2*r^2/4)", &sym), 1);
  e.definitions["U"] = U;
  e.golden = melvin_type_table();
  for (auto& g : rows_to_entries({{"g", "1 1", "-U^2"},
                                  {"g", "2 2", "U^2"},
                                  {"g", "3 3", "U^2"},
                                  {"g", "4 4", "r^2/U^2"},
                                  {"F", "2 4", "8*B0*r/(4 + B0^2*r^2)^2"},
                                  {"kappa", "", "0"}}))
    e.golden.push_back(std::move(g));
  return e;
}

CatalogEntry melvin_type(const std::string& f_source, const MelvinTypeOptions& options) {
  Chart chart{{kCoordinates4, kCoordinates4 + 4}};
  MetricSpec m("melvin_type[f=" + f_source + "]", chart, Signature{1, 3}, options.parameters);
  SymbolTable sym = symbols_for(chart.coordinates, options.parameters);
  const Expr f = parse_profile(f_source, sym);
  sym.definitions["f"] = f;
  m.set_component(0, 0, parse("-exp(2*f)", &sym));
  m.set_component(1, 1, parse("exp(2*f)", &sym));
  m.set_component(2, 2, parse("exp(2*f)", &sym));
  m.set_component(3, 3, parse("r^2*exp(-2*f)", &sym));
  m.domain.push_back({parse("r", &sym), Relation::greater, Expr(0.0)});
  m.exceptional = {parse("r", &sym)};

  CatalogEntry e{m.name, "Melvin-type metric in Weyl form", std::move(m), {}, f_definitions(f, 1), {}};
  if (options.exclude_conformally_flat_locus) {
    SymbolTable dsym = sym;
    dsym.definitions.insert(e.definitions.begin(), e.definitions.end());
    e.metric.exceptional.push_back(parse("r*fpp - 2*r*fp^2 + 2*fp", &dsym));
  }
  set_samples(e.metric);
  e.golden = melvin_type_table();
  return e;
}

CatalogEntry base_3metric(const std::string& f_source, const ParamEnv& parameters) {
  Chart chart{{"t", "r", "z"}};
  MetricSpec m("base_3metric[f=" + f_source + "]", chart, Signature{1, 2}, parameters);
  SymbolTable sym = symbols_for(chart.coordinates, parameters);
  const Expr f = parse_profile(f_source, sym);
  sym.definitions["f"] = f;
  m.set_component(0, 0, parse("-exp(2*f)", &sym));
  m.set_component(1, 1, parse("exp(2*f)", &sym));
  m.set_component(2, 2, parse("exp(2*f)", &sym));
  m.domain.push_back({parse("r", &sym), Relation::greater, Expr(0.0)});

  CatalogEntry e{m.name, "3-dimensional base of the Melvin-type metric", std::move(m), {}, f_definitions(f, 1), {}};
  SymbolTable dsym = sym;
  dsym.definitions.insert(e.definitions.begin(), e.definitions.end());
  e.metric.exceptional = {parse("fp^2 + 2*fpp", &dsym)};
  set_samples(e.metric);
  e.golden = base_table();
  return e;
}

namespace {

struct Named {
  const char* name;
  const char* kind;  // melvin | minkowski | melvin_type | melvin_type_cf | base
  const char* f;
};

const Named kNamed[] = {
    {"melvin", "melvin", ""},
    {"minkowski", "minkowski", ""},
    {"melvin_type_generic", "melvin_type", "ln(1 + r)"},
    {"melvin_type_trig", "melvin_type", "r/3 + sin(2*r)/10"},
    {"melvin_type_conformally_flat", "melvin_type_cf", "ln(r/(r + 2))/2"},
    {"melvin_type_pseudosymmetric", "melvin_type", "ln(1 + r^2)"},
    {"base_3metric", "base", "ln(1 + r)"},
    {"base_3metric_trig", "base", "r/3 + sin(2*r)/10"},
    {"base_3metric_square", "base", "ln(1 + r^2)"},
};

}  // namespace

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& n : kNamed) out.push_back(n.name);
  out.push_back("melvin_type:<f>");
  out.push_back("base_3metric:<f>");
  return out;
}

CatalogEntry lookup(const std::string& name, const ParamEnv& overrides) {
  auto rename = [](CatalogEntry e, const std::string& n) {
    e.name = n;
    e.metric.name = n;
    return e;
  };
  if (name.rfind("melvin_type:", 0) == 0) return melvin_type(name.substr(12), {true, overrides});
  if (name.rfind("base_3metric:", 0) == 0) return base_3metric(name.substr(13), overrides);
  for (const auto& n : kNamed) {
    if (name != n.name) continue;
    const std::string kind = n.kind;
    if (kind == "melvin") {
      for (const auto& [k, v] : overrides)
        if (k != "B0") throw std::out_of_range("melvin has no parameter '" + k + "'");
      auto it = overrides.find("B0");
      return melvin(it == overrides.end() ? 1.0 : it->second);
    }
    if (kind == "minkowski") return rename(melvin(0.0), n.name);
    if (kind == "melvin_type") return rename(melvin_type(n.f, {true, overrides}), n.name);
    if (kind == "melvin_type_cf") return rename(melvin_type(n.f, {false, overrides}), n.name);
    return rename(base_3metric(n.f, overrides), n.name);
  }
  throw std::out_of_range("unknown catalog metric '" + name + "'");
}

std::unique_ptr<Geometry> make_geometry(const CatalogEntry& entry) {
  auto g = std::make_unique<Geometry>(entry.metric);
  for (const auto& f : entry.fields) g->add_field(f.name, f.tensor, f.symmetry);
  return g;
}

// ---------------------------------------------------------------------------

std::string to_string(GoldenStatus s) {
  switch (s) {
    case GoldenStatus::match: return "match";
    case GoldenStatus::disputed: return "disputed";
    case GoldenStatus::mismatch: return "mismatch";
  }
  return "?";
}

GoldenStatus golden_status_from_string(const std::string& s) {
  if (s == "match") return GoldenStatus::match;
  if (s == "disputed") return GoldenStatus::disputed;
  if (s == "mismatch") return GoldenStatus::mismatch;
  throw std::invalid_argument("unknown golden status '" + s + "'");
}

std::size_t GoldenReport::count(GoldenStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [s](const GoldenOutcome& o) { return o.status == s; }));
}

namespace {

enum class Shape { scalar, symmetric2, antisymmetric2, riemann, riemann_deriv, riemann_pair, antisym_pair, none };

bool riemann_like(const std::string& n) { return n == "R" || n == "C" || n == "K" || n == "W" || n == "G"; }

Shape shape_of(const std::string& tensor) {
  if (tensor == "kappa") return Shape::scalar;
  if (tensor == "F") return Shape::antisymmetric2;
  if (tensor == "g" || tensor == "ginv" || tensor == "S" || tensor == "S2" || tensor == "S3" || tensor == "S4")
    return Shape::symmetric2;
  if (riemann_like(tensor)) return Shape::riemann;
  if (tensor.rfind("nabla", 0) == 0 && riemann_like(tensor.substr(5))) return Shape::riemann_deriv;
  std::string acted;
  if (const auto dot = tensor.find("dot"); dot != std::string::npos) {
    acted = tensor.substr(dot + 3);
  } else if (tensor.size() > 2 && tensor[0] == 'Q') {
    acted = tensor.substr(tensor.size() - 1);
  }
  if (riemann_like(acted)) return Shape::riemann_pair;
  if (acted == "F") return Shape::antisym_pair;
  return Shape::none;
}

}  // namespace

std::vector<std::pair<std::vector<int>, int>> symmetry_orbit(const std::string& tensor, const std::vector<int>& index) {
  std::vector<std::pair<std::vector<int>, int>> out{{index, 1}};
  auto extend = [&](auto&& ops) {
    std::vector<std::pair<std::vector<int>, int>> next;
    for (const auto& [idx, sign] : out) {
      for (const auto& [perm, s] : ops) {
        std::vector<int> j = idx;
        for (std::size_t k = 0; k < perm.size(); ++k) j[k] = idx[perm[k]];
        next.push_back({j, sign * s});
      }
    }
    out.clear();
    std::set<std::vector<int>> seen;
    for (auto& p : next)
      if (seen.insert(p.first).second) out.push_back(std::move(p));
  };
  using Ops = std::vector<std::pair<std::vector<std::size_t>, int>>;
  const Ops riemann{{{0, 1, 2, 3}, 1}, {{1, 0, 2, 3}, -1}, {{0, 1, 3, 2}, -1}, {{1, 0, 3, 2}, 1},
                    {{2, 3, 0, 1}, 1}, {{3, 2, 0, 1}, -1}, {{2, 3, 1, 0}, -1}, {{3, 2, 1, 0}, 1}};
  auto tail_swap = [&](std::size_t a) {
    Ops ops;
    std::vector<std::size_t> id(index.size()), sw;
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
    sw = id;
    std::swap(sw[a], sw[a + 1]);
    ops.push_back({id, 1});
    ops.push_back({sw, -1});
    return ops;
  };
  switch (shape_of(tensor)) {
    case Shape::symmetric2: extend(Ops{{{0, 1}, 1}, {{1, 0}, 1}}); break;
    case Shape::antisymmetric2: extend(Ops{{{0, 1}, 1}, {{1, 0}, -1}}); break;
    case Shape::riemann:
    case Shape::riemann_deriv: extend(riemann); break;
    case Shape::riemann_pair:
      extend(riemann);
      extend(tail_swap(4));
      break;
    case Shape::antisym_pair:
      extend(Ops{{{0, 1, 2, 3}, 1}, {{1, 0, 2, 3}, -1}});
      extend(tail_swap(2));
      break;
    default: break;
  }
  return out;
}

GoldenReport golden_check(const CatalogEntry& entry, const SampledGeometry& sg, double rel, double abs_floor) {
  SymbolTable sym = entry.metric.symbols();
  sym.definitions = entry.definitions;

  GoldenReport report;
  std::map<std::string, std::vector<NumericTensor>> cache;
  auto tensor = [&](const std::string& name) -> const std::vector<NumericTensor>& {
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    std::vector<NumericTensor> v;
    for (const auto& p : sg.points()) v.push_back(named_tensor(p, name));
    return cache.emplace(name, std::move(v)).first->second;
  };

  for (const GoldenEntry& g : entry.golden) {
    const Expr printed = parse(g.printed, &sym);
    const Expr corrected = g.corrected.empty() ? Expr() : parse(g.corrected, &sym);
    std::vector<int> idx0;
    for (int i : g.index) idx0.push_back(i - 1);

    GoldenOutcome o;
    o.tensor = g.tensor;
    o.index = g.index;
    o.printed = g.printed;
    o.sign_only = g.sign_only;
    o.note = g.note;
    bool printed_ok = true, magnitude_ok = true, corrected_ok = !g.corrected.empty();
    const auto& values = tensor(g.tensor);
    for (std::size_t p = 0; p < sg.size(); ++p) {
      Evaluator ev(sg[p].point, sg.grid().params);
      const NumericTensor& t = values[p];
      const double engine = t.rank() == 0 ? t[0] : t.at(idx0);
      // Scalars are measured against the Ricci operator, which sets their natural size.
      const double scale = t.rank() == 0 ? std::max(std::fabs(engine), max_abs(sg[p].field("J"))) : max_abs(t);
      const double bound = std::max(rel * scale, abs_floor);
      const double v = ev(printed);
      const double diff = std::fabs(engine - v);
      const double err = scale > 0.0 ? diff / scale : diff;
      if (err > o.max_error || p == 0) {
        o.max_error = err;
        o.worst_point = p;
      }
      printed_ok = printed_ok && diff <= bound;
      magnitude_ok = magnitude_ok && std::fabs(std::fabs(engine) - std::fabs(v)) <= bound;
      if (corrected_ok) corrected_ok = std::fabs(engine - ev(corrected)) <= bound;
    }
    o.printed_matches = printed_ok;
    if (printed_ok) {
      o.status = GoldenStatus::match;
    } else if (g.disputed && ((g.sign_only && magnitude_ok) || corrected_ok)) {
      o.status = GoldenStatus::disputed;
    } else {
      o.status = GoldenStatus::mismatch;
    }
    report.outcomes.push_back(std::move(o));
  }

  // Components the printed tables leave out.
  std::map<std::string, std::set<std::vector<int>>> covered;
  for (const auto& g : entry.golden) {
    std::vector<int> idx0;
    for (int i : g.index) idx0.push_back(i - 1);
    for (const auto& [j, s] : symmetry_orbit(g.tensor, idx0)) covered[g.tensor].insert(j);
  }
  for (const auto& [name, cov] : covered) {
    const auto& values = tensor(name);
    if (values.empty() || values[0].rank() == 0) continue;
    std::set<std::vector<int>> reported;
    for (const auto& t : values) {
      const double scale = max_abs(t);
      for_each_index(t.dim(), t.rank(), [&](const MultiIndex& i, std::size_t f) {
        if (std::fabs(t[f]) <= std::max(1e-9 * scale, abs_floor)) return;
        std::vector<int> j(i.begin(), i.begin() + t.rank());
        if (cov.count(j)) return;
        auto orbit = symmetry_orbit(name, j);
        std::vector<int> canon = orbit.front().first;
        for (const auto& [k, s] : orbit) canon = std::min(canon, k);
        if (!reported.insert(canon).second) return;
        for (int& x : canon) ++x;
        report.unlisted.push_back({name, canon});
      });
    }
  }
  return report;
}

}  // namespace curvkit
