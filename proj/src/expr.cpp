#include "curvkit/expr.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace curvkit {

namespace {

std::shared_ptr<const ExprNode> make_node(ExprKind kind, std::vector<Expr> children) {
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  std::uint64_t mask = 0;
  for (const auto& c : children) mask |= c.coordinate_mask();
  node->mask = mask;
  node->children = std::move(children);
  return node;
}

std::shared_ptr<const ExprNode> constant_node(double v) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Constant;
  node->value = v;
  return node;
}

const std::shared_ptr<const ExprNode>& zero_node() {
  static const auto node = constant_node(0.0);
  return node;
}

const std::shared_ptr<const ExprNode>& one_node() {
  static const auto node = constant_node(1.0);
  return node;
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

const char* function_name(ExprKind k) {
  switch (k) {
    case ExprKind::Exp: return "exp";
    case ExprKind::Ln: return "ln";
    case ExprKind::Sin: return "sin";
    case ExprKind::Cos: return "cos";
    case ExprKind::Sqrt: return "sqrt";
    default: return nullptr;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(double value) : node_(value == 0.0 && !std::signbit(value) ? zero_node()
                                 : value == 1.0                       ? one_node()
                                                                      : constant_node(value)) {}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::coordinate(std::string name, int index) {
  if (index < 0 || index >= 64) throw std::invalid_argument("coordinate index out of range");
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Coordinate;
  node->name = std::move(name);
  node->index = index;
  node->mask = std::uint64_t{1} << index;
  return Expr(std::shared_ptr<const ExprNode>(std::move(node)));
}

Expr Expr::parameter(std::string name) {
  auto node = std::make_shared<ExprNode>();
  node->kind = ExprKind::Parameter;
  node->name = std::move(name);
  return Expr(std::shared_ptr<const ExprNode>(std::move(node)));
}

Expr Expr::raw(ExprKind kind, std::vector<Expr> children) {
  std::size_t expected = 0;
  switch (kind) {
    case ExprKind::Constant:
    case ExprKind::Coordinate:
    case ExprKind::Parameter:
      throw std::invalid_argument("Expr::raw: leaf kinds have dedicated constructors");
    case ExprKind::Add:
    case ExprKind::Mul:
      if (children.size() < 2) throw std::invalid_argument("Expr::raw: sum/product needs two or more terms");
      return Expr(make_node(kind, std::move(children)));
    case ExprKind::Div:
    case ExprKind::Pow: expected = 2; break;
    default: expected = 1; break;
  }
  if (children.size() != expected) throw std::invalid_argument("Expr::raw: wrong number of children");
  return Expr(make_node(kind, std::move(children)));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::index() const { return node_->index; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::children() const { return node_->children; }
std::uint64_t Expr::coordinate_mask() const { return node_->mask; }
bool Expr::is_zero() const { return is_constant() && node_->value == 0.0; }
bool Expr::is_one() const { return is_constant() && node_->value == 1.0; }

// ---------------------------------------------------------------------------
// Arithmetic

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() + b.value());
  std::vector<Expr> terms;
  auto append = [&terms](const Expr& e) {
    if (e.kind() == ExprKind::Add) {
      terms.insert(terms.end(), e.children().begin(), e.children().end());
    } else {
      terms.push_back(e);
    }
  };
  append(a);
  append(b);
  return Expr::raw(ExprKind::Add, std::move(terms));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.kind() == ExprKind::Neg) return a.children()[0];
  return Expr::raw(ExprKind::Neg, {a});
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() - b.value());
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant()) return Expr(a.value() * b.value());
  if (a.is_constant() && a.value() == -1.0) return -b;
  if (b.is_constant() && b.value() == -1.0) return -a;
  std::vector<Expr> factors;
  auto append = [&factors](const Expr& e) {
    if (e.kind() == ExprKind::Mul) {
      factors.insert(factors.end(), e.children().begin(), e.children().end());
    } else {
      factors.push_back(e);
    }
  };
  append(a);
  append(b);
  return Expr::raw(ExprKind::Mul, std::move(factors));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_one()) return a;
  if (a.is_zero() && !b.is_zero()) return Expr();
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) return Expr(a.value() / b.value());
  return Expr::raw(ExprKind::Div, {a, b});
}

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1.0);
  if (exponent.is_one()) return base;
  if (base.is_constant() && exponent.is_constant()) {
    const double v = std::pow(base.value(), exponent.value());
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::raw(ExprKind::Pow, {base, exponent});
}

namespace {

Expr apply_function(ExprKind kind, const Expr& x) {
  if (x.is_constant()) {
    const double v = x.value();
    double r = NAN;
    switch (kind) {
      case ExprKind::Exp: r = std::exp(v); break;
      case ExprKind::Ln: r = v > 0 ? std::log(v) : NAN; break;
      case ExprKind::Sin: r = std::sin(v); break;
      case ExprKind::Cos: r = std::cos(v); break;
      case ExprKind::Sqrt: r = v >= 0 ? std::sqrt(v) : NAN; break;
      default: break;
    }
    if (std::isfinite(r)) return Expr(r);
  }
  return Expr::raw(kind, {x});
}

}  // namespace

Expr exp(const Expr& x) { return apply_function(ExprKind::Exp, x); }
Expr ln(const Expr& x) { return apply_function(ExprKind::Ln, x); }
Expr sin(const Expr& x) { return apply_function(ExprKind::Sin, x); }
Expr cos(const Expr& x) { return apply_function(ExprKind::Cos, x); }
Expr sqrt(const Expr& x) { return apply_function(ExprKind::Sqrt, x); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Constant:
      return a.value() == b.value() && std::signbit(a.value()) == std::signbit(b.value());
    case ExprKind::Coordinate: return a.index() == b.index() && a.name() == b.name();
    case ExprKind::Parameter: return a.name() == b.name();
    default: break;
  }
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!structurally_equal(a.children()[i], b.children()[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing
//
// The printer is the inverse of the parser: every tree prints to text that
// parses back to the same tree. Parentheses are inserted exactly where the
// grammar would otherwise regroup or fold nodes.

namespace {

std::string format_number(double v) {
  char buf[40];
  if (is_integer(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  std::string s = buf;
  if (std::signbit(v) && s[0] != '-') s.insert(s.begin(), '-');
  return s;
}

void print(std::ostringstream& os, const Expr& e);

void print_wrapped(std::ostringstream& os, const Expr& e, bool wrap) {
  if (wrap) os << '(';
  print(os, e);
  if (wrap) os << ')';
}

bool is_sum(const Expr& e) { return e.kind() == ExprKind::Add; }
bool is_product_like(const Expr& e) { return e.kind() == ExprKind::Mul || e.kind() == ExprKind::Div; }

void print(std::ostringstream& os, const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant: os << format_number(e.value()); return;
    case ExprKind::Coordinate:
    case ExprKind::Parameter: os << e.name(); return;
    case ExprKind::Neg: {
      const Expr& x = e.children()[0];
      os << '-';
      const bool wrap = is_sum(x) || is_product_like(x) || x.kind() == ExprKind::Pow ||
                        (x.is_constant() && !std::signbit(x.value()));
      print_wrapped(os, x, wrap);
      return;
    }
    case ExprKind::Add: {
      const auto terms = e.children();
      print_wrapped(os, terms[0], is_sum(terms[0]));
      for (std::size_t i = 1; i < terms.size(); ++i) {
        const Expr& t = terms[i];
        if (t.kind() == ExprKind::Neg) {
          os << " - ";
          print_wrapped(os, t.children()[0], is_sum(t.children()[0]));
        } else {
          os << " + ";
          print_wrapped(os, t, is_sum(t));
        }
      }
      return;
    }
    case ExprKind::Mul: {
      const auto factors = e.children();
      print_wrapped(os, factors[0], is_sum(factors[0]) || factors[0].kind() == ExprKind::Mul);
      for (std::size_t i = 1; i < factors.size(); ++i) {
        os << " * ";
        print_wrapped(os, factors[i], is_sum(factors[i]) || is_product_like(factors[i]));
      }
      return;
    }
    case ExprKind::Div: {
      const Expr& num = e.children()[0];
      const Expr& den = e.children()[1];
      print_wrapped(os, num, is_sum(num));
      os << " / ";
      print_wrapped(os, den, is_sum(den) || is_product_like(den));
      return;
    }
    case ExprKind::Pow: {
      const Expr& base = e.children()[0];
      const Expr& ex = e.children()[1];
      const bool wrap = is_sum(base) || is_product_like(base) || base.kind() == ExprKind::Pow ||
                        base.kind() == ExprKind::Neg || (base.is_constant() && std::signbit(base.value()));
      print_wrapped(os, base, wrap);
      os << '^';
      if (ex.is_constant() && is_integer(ex.value()) && std::fabs(ex.value()) < 1e15 &&
          !(ex.value() == 0.0 && std::signbit(ex.value()))) {
        os << format_number(ex.value());
      } else {
        print_wrapped(os, ex, true);
      }
      return;
    }
    default: {
      os << function_name(e.kind()) << '(';
      print(os, e.children()[0]);
      os << ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

// ---------------------------------------------------------------------------
// Differentiation

Differentiator::Differentiator(std::string name, int index) : name_(std::move(name)), index_(index) {}
Differentiator::Differentiator(std::string name) : name_(std::move(name)), index_(-1) {}

Expr Differentiator::operator()(const Expr& e) { return derive(e); }

Expr Differentiator::derive(const Expr& e) {
  if (index_ >= 0 && (e.coordinate_mask() & (std::uint64_t{1} << index_)) == 0) return Expr();
  switch (e.kind()) {
    case ExprKind::Constant: return Expr();
    case ExprKind::Coordinate: return Expr(e.index() == index_ && index_ >= 0 ? 1.0 : 0.0);
    case ExprKind::Parameter: return Expr(index_ < 0 && e.name() == name_ ? 1.0 : 0.0);
    default: break;
  }
  if (auto it = memo_.find(e.node()); it != memo_.end()) return it->second;

  const auto c = e.children();
  Expr result;
  switch (e.kind()) {
    case ExprKind::Neg: result = -derive(c[0]); break;
    case ExprKind::Add:
      for (const auto& t : c) result += derive(t);
      break;
    case ExprKind::Mul:
      for (std::size_t i = 0; i < c.size(); ++i) {
        Expr di = derive(c[i]);
        if (di.is_zero()) continue;
        Expr term = di;
        for (std::size_t j = 0; j < c.size(); ++j) {
          if (j != i) term = term * c[j];
        }
        result += term;
      }
      break;
    case ExprKind::Div: {
      const Expr da = derive(c[0]);
      const Expr db = derive(c[1]);
      result = da / c[1];
      if (!db.is_zero()) result = result - c[0] * db / pow(c[1], 2.0);
      break;
    }
    case ExprKind::Pow: {
      const Expr& base = c[0];
      const Expr& ex = c[1];
      const Expr db = derive(base);
      const Expr dex = derive(ex);
      if (ex.is_constant()) {
        result = ex * pow(base, Expr(ex.value() - 1.0)) * db;
      } else {
        Expr inner = dex * ln(base);
        if (!db.is_zero()) inner = inner + ex * db / base;
        result = e * inner;
      }
      break;
    }
    case ExprKind::Exp: result = e * derive(c[0]); break;
    case ExprKind::Ln: result = derive(c[0]) / c[0]; break;
    case ExprKind::Sin: result = cos(c[0]) * derive(c[0]); break;
    case ExprKind::Cos: result = -(sin(c[0]) * derive(c[0])); break;
    case ExprKind::Sqrt: result = derive(c[0]) / (2.0 * e); break;
    default: break;
  }
  memo_.emplace(e.node(), result);
  return result;
}

Expr differentiate(const Expr& e, const std::string& coordinate_name, int coordinate_index) {
  Differentiator d(coordinate_name, coordinate_index);
  return d(e);
}

Expr differentiate(const Expr& e, const std::string& symbol_name) {
  // Coordinates referenced by name: locate the index from the tree itself.
  int index = -1;
  std::vector<const Expr*> stack{&e};
  while (!stack.empty() && index < 0) {
    const Expr* x = stack.back();
    stack.pop_back();
    if (x->kind() == ExprKind::Coordinate && x->name() == symbol_name) index = x->index();
    for (const auto& c : x->children()) stack.push_back(&c);
  }
  if (index >= 0) return differentiate(e, symbol_name, index);
  Differentiator d(symbol_name);
  return d(e);
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

Expr simplify_rec(const Expr& e, std::unordered_map<const ExprNode*, Expr>& memo) {
  if (e.children().empty()) return e;
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  std::vector<Expr> c;
  c.reserve(e.children().size());
  for (const auto& x : e.children()) c.push_back(simplify_rec(x, memo));

  Expr out;
  switch (e.kind()) {
    case ExprKind::Neg:
      if (c[0].is_constant()) {
        out = Expr(-c[0].value());
      } else if (c[0].kind() == ExprKind::Neg) {
        out = c[0].children()[0];
      } else {
        out = Expr::raw(ExprKind::Neg, c);
      }
      break;
    case ExprKind::Add: {
      // Left-to-right evaluation order is kept: only a leading run of
      // constants folds, zero terms drop out.
      std::vector<Expr> kept;
      for (const auto& x : c) {
        if (kept.size() == 1 && kept[0].is_constant() && x.is_constant()) {
          kept[0] = Expr(kept[0].value() + x.value());
        } else if (!x.is_zero()) {
          kept.push_back(x);
        }
      }
      if (kept.size() > 1 && kept[0].is_zero()) kept.erase(kept.begin());
      out = kept.empty() ? Expr() : kept.size() == 1 ? kept[0] : Expr::raw(ExprKind::Add, kept);
      break;
    }
    case ExprKind::Mul: {
      bool any_zero = false;
      for (const auto& x : c) any_zero = any_zero || x.is_zero();
      if (any_zero) {
        out = Expr();
        break;
      }
      std::vector<Expr> kept;
      for (const auto& x : c) {
        if (!kept.empty() && kept.size() == 1 && kept[0].is_constant() && x.is_constant()) {
          kept[0] = Expr(kept[0].value() * x.value());
          continue;
        }
        if (x.is_one()) continue;
        kept.push_back(x);
      }
      if (kept.size() > 1 && kept[0].is_one()) kept.erase(kept.begin());
      out = kept.empty() ? Expr(1.0) : kept.size() == 1 ? kept[0] : Expr::raw(ExprKind::Mul, kept);
      break;
    }
    case ExprKind::Div:
      if (c[1].is_one()) {
        out = c[0];
      } else if (c[0].is_constant() && c[1].is_constant() && c[1].value() != 0.0) {
        out = Expr(c[0].value() / c[1].value());
      } else {
        out = Expr::raw(ExprKind::Div, c);
      }
      break;
    case ExprKind::Pow:
      if (c[1].is_zero()) {
        out = Expr(1.0);
      } else if (c[1].is_one()) {
        out = c[0];
      } else if (c[0].is_constant() && c[1].is_constant() &&
                 std::isfinite(std::pow(c[0].value(), c[1].value()))) {
        out = Expr(std::pow(c[0].value(), c[1].value()));
      } else {
        out = Expr::raw(ExprKind::Pow, c);
      }
      break;
    default: out = apply_function(e.kind(), c[0]); break;
  }
  memo.emplace(e.node(), out);
  return out;
}

}  // namespace

Expr simplify(const Expr& e) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return simplify_rec(e, memo);
}

// ---------------------------------------------------------------------------
// Evaluation

Evaluator::Evaluator(std::vector<double> coordinates, ParamEnv params)
    : coordinates_(std::move(coordinates)), params_(std::move(params)) {}

double Evaluator::operator()(const Expr& e) { return eval(e); }

double Evaluator::eval(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Constant: return e.value();
    case ExprKind::Coordinate:
      if (e.index() >= static_cast<int>(coordinates_.size())) {
        throw UnboundSymbolError("coordinate '" + e.name() + "' has no value at this point");
      }
      return coordinates_[e.index()];
    case ExprKind::Parameter: {
      auto it = params_.find(e.name());
      if (it == params_.end()) throw UnboundSymbolError("parameter '" + e.name() + "' is not bound");
      return it->second;
    }
    default: break;
  }
  if (auto it = cache_.find(e.node()); it != cache_.end()) return it->second;

  const auto c = e.children();
  double v = 0.0;
  switch (e.kind()) {
    case ExprKind::Neg: v = -eval(c[0]); break;
    case ExprKind::Add:
      v = eval(c[0]);
      for (std::size_t i = 1; i < c.size(); ++i) v += eval(c[i]);
      break;
    case ExprKind::Mul:
      v = eval(c[0]);
      for (std::size_t i = 1; i < c.size(); ++i) v *= eval(c[i]);
      break;
    case ExprKind::Div: {
      const double num = eval(c[0]);
      const double den = eval(c[1]);
      if (den == 0.0) throw DomainError("division by zero", to_string(e));
      v = num / den;
      break;
    }
    case ExprKind::Pow: {
      const double b = eval(c[0]);
      const double x = eval(c[1]);
      if (b < 0.0 && !is_integer(x)) throw DomainError("non-integer power of a negative number", to_string(e));
      if (b == 0.0 && x < 0.0) throw DomainError("division by zero", to_string(e));
      v = std::pow(b, x);
      break;
    }
    case ExprKind::Exp: v = std::exp(eval(c[0])); break;
    case ExprKind::Ln: {
      const double x = eval(c[0]);
      if (!(x > 0.0)) throw DomainError("logarithm of a non-positive number", to_string(e));
      v = std::log(x);
      break;
    }
    case ExprKind::Sin: v = std::sin(eval(c[0])); break;
    case ExprKind::Cos: v = std::cos(eval(c[0])); break;
    case ExprKind::Sqrt: {
      const double x = eval(c[0]);
      if (x < 0.0) throw DomainError("square root of a negative number", to_string(e));
      v = std::sqrt(x);
      break;
    }
    default: break;
  }
  if (!std::isfinite(v)) throw DomainError("non-finite value", to_string(e));
  cache_.emplace(e.node(), v);
  return v;
}

double evaluate(const Expr& e, std::span<const double> coordinates, const ParamEnv& params) {
  Evaluator ev(std::vector<double>(coordinates.begin(), coordinates.end()), params);
  return ev(e);
}

}  // namespace curvkit
