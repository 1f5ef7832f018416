#include "curvkit/metric_file.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

namespace curvkit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Re-throws a parse error with context while keeping the expression offset.
[[noreturn]] void rethrow(const ParseError& e, const std::string& where) {
  throw ParseError(std::string(e.what()).substr(0, std::string(e.what()).rfind(" at offset")) + " in " + where,
                   e.offset());
}

Expr parse_in(std::string_view text, const SymbolTable& symbols, const std::string& where) {
  try {
    return parse(text, &symbols);
  } catch (const ParseError& e) {
    rethrow(e, where);
  }
}

YAML::Node require(const YAML::Node& root, const char* key) {
  YAML::Node n = root[key];
  if (!n) throw MetricFileError(std::string("metric file is missing '") + key + "'");
  return n;
}

}  // namespace

DomainPredicate parse_predicate(std::string_view text, const SymbolTable& symbols) {
  static const std::pair<const char*, Relation> ops[] = {
      {">=", Relation::greater_equal}, {"<=", Relation::less_equal}, {"!=", Relation::not_equal},
      {">", Relation::greater},        {"<", Relation::less},
  };
  for (const auto& [op, rel] : ops) {
    const auto pos = text.find(op);
    if (pos == std::string_view::npos) continue;
    const std::string where = "domain predicate '" + std::string(text) + "'";
    DomainPredicate p;
    p.lhs = parse_in(text.substr(0, pos), symbols, where);
    p.relation = rel;
    p.rhs = parse_in(text.substr(pos + std::char_traits<char>::length(op)), symbols, where);
    return p;
  }
  throw MetricFileError("domain predicate '" + std::string(text) + "' has no comparison operator");
}

MetricSpec parse_metric_text(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw MetricFileError(std::string("malformed metric file: ") + e.what());
  }
  if (!root.IsMap()) throw MetricFileError("metric file must be a mapping");

  try {
    Chart chart;
    for (const auto& c : require(root, "coordinates")) chart.coordinates.push_back(c.as<std::string>());
    if (root["dimension"] && root["dimension"].as<int>() != chart.dim()) {
      throw MetricFileError("dimension " + root["dimension"].as<std::string>() + " does not match " +
                            std::to_string(chart.dim()) + " coordinates");
    }
    const YAML::Node sig = require(root, "signature");
    if (!sig.IsSequence() || sig.size() != 2) throw MetricFileError("signature must be [negative, positive]");
    Signature signature{sig[0].as<int>(), sig[1].as<int>()};

    ParamEnv params;
    if (const YAML::Node p = root["parameters"]) {
      for (const auto& kv : p) params[kv.first.as<std::string>()] = kv.second.as<double>();
    }
    MetricSpec m(root["name"] ? root["name"].as<std::string>() : std::string("metric"), chart, signature, params);
    SymbolTable symbols = m.symbols();

    if (const YAML::Node defs = root["definitions"]) {
      for (const auto& d : defs) {
        const std::string entry = d.as<std::string>();
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw MetricFileError("definition '" + entry + "' needs 'name = expression'");
        const std::string name = trim(std::string_view(entry).substr(0, eq));
        if (name.empty()) throw MetricFileError("definition '" + entry + "' has no name");
        symbols.definitions[name] =
            parse_in(std::string_view(entry).substr(eq + 1), symbols, "definition '" + name + "'");
      }
    }

    for (const auto& c : require(root, "components")) {
      const std::string entry = c.as<std::string>();
      const auto colon = entry.find(':');
      if (colon == std::string::npos) throw MetricFileError("component '" + entry + "' needs 'a b : expression'");
      std::istringstream idx(entry.substr(0, colon));
      int a = 0, b = 0;
      std::string extra;
      if (!(idx >> a >> b) || (idx >> extra)) throw MetricFileError("component '" + entry + "' has a bad index pair");
      if (a < 1 || b < 1 || a > m.dim() || b > m.dim()) {
        throw MetricFileError("component '" + entry + "' index out of range 1.." + std::to_string(m.dim()));
      }
      m.set_component(a - 1, b - 1,
                      parse_in(std::string_view(entry).substr(colon + 1), symbols,
                               "component g_" + std::to_string(a) + std::to_string(b)));
    }

    if (const YAML::Node dom = root["domain"]) {
      for (const auto& d : dom) m.domain.push_back(parse_predicate(d.as<std::string>(), symbols));
    }
    if (const YAML::Node ex = root["exceptional"]) {
      for (const auto& e : ex) {
        const std::string s = e.as<std::string>();
        m.exceptional.push_back(parse_in(s, symbols, "exceptional locus '" + s + "'"));
      }
    }
    if (const YAML::Node s = root["samples"]) {
      for (const auto& kv : s) {
        const std::string coord = kv.first.as<std::string>();
        const int i = m.chart.index_of(coord);
        if (i < 0) throw MetricFileError("samples name unknown coordinate '" + coord + "'");
        for (const auto& v : kv.second) m.samples[i].push_back(v.as<double>());
      }
    }
    return m;
  } catch (const YAML::Exception& e) {
    throw MetricFileError(std::string("malformed metric file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw MetricFileError(e.what());
  }
}

MetricSpec load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open metric file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_metric_text(buf.str());
}

std::string export_metric(const MetricSpec& m) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << m.name;
  out << YAML::Key << "dimension" << YAML::Value << m.dim();
  out << YAML::Key << "coordinates" << YAML::Value << YAML::Flow << m.chart.coordinates;
  out << YAML::Key << "signature" << YAML::Value << YAML::Flow << YAML::BeginSeq << m.signature.negative
      << m.signature.positive << YAML::EndSeq;
  if (!m.parameters.empty()) {
    out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : m.parameters) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  }
  out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
  for (int a = 0; a < m.dim(); ++a) {
    for (int b = a; b < m.dim(); ++b) {
      if (m.g(a, b).is_zero()) continue;
      out << (std::to_string(a + 1) + " " + std::to_string(b + 1) + " : " + to_string(m.g(a, b)));
    }
  }
  out << YAML::EndSeq;
  if (!m.domain.empty()) {
    out << YAML::Key << "domain" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : m.domain) out << to_string(p);
    out << YAML::EndSeq;
  }
  if (!m.exceptional.empty()) {
    out << YAML::Key << "exceptional" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : m.exceptional) out << to_string(e);
    out << YAML::EndSeq;
  }
  bool any_samples = false;
  for (const auto& s : m.samples) any_samples = any_samples || !s.empty();
  if (any_samples) {
    out << YAML::Key << "samples" << YAML::Value << YAML::BeginMap;
    for (int i = 0; i < m.dim(); ++i) {
      if (m.samples[i].empty()) continue;
      out << YAML::Key << m.chart.coordinates[i] << YAML::Value << YAML::Flow << m.samples[i];
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace curvkit
