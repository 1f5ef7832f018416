// Symbolic scalar fields over a coordinate chart.
//
// An Expr is an immutable handle to a shared expression DAG. Subtrees are
// shared freely between expressions, so evaluation goes through an Evaluator
// that memoizes node values for one point.
#ifndef CURVKIT_EXPR_HPP
#define CURVKIT_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace curvkit {

enum class ExprKind : std::uint8_t {
  Constant,
  Coordinate,
  Parameter,
  Neg,
  Add,
  Mul,
  Div,
  Pow,
  Exp,
  Ln,
  Sin,
  Cos,
  Sqrt,
};

struct ExprNode;

class Expr {
 public:
  Expr();
  Expr(double value);  // NOLINT: implicit so literals mix with symbolic terms

  static Expr constant(double value);
  static Expr coordinate(std::string name, int index);
  static Expr parameter(std::string name);
  /// Builds a node without any simplification. Used by the parser so that
  /// printing and re-parsing reproduces the tree exactly.
  static Expr raw(ExprKind kind, std::vector<Expr> children);

  ExprKind kind() const;
  double value() const;
  int index() const;
  const std::string& name() const;
  std::span<const Expr> children() const;
  /// Bit i set when coordinate i occurs somewhere below this node.
  std::uint64_t coordinate_mask() const;

  bool is_constant() const { return kind() == ExprKind::Constant; }
  bool is_zero() const;
  bool is_one() const;
  const ExprNode* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;
  int index = -1;
  std::string name;
  std::vector<Expr> children;
  std::uint64_t mask = 0;
};

// Arithmetic with shallow simplification: constant folding, 0/1 identities,
// flattening of nested sums and products.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& x);
Expr ln(const Expr& x);
Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr sqrt(const Expr& x);

/// Same tree shape, kinds, names and constants.
bool structurally_equal(const Expr& a, const Expr& b);

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// ---------------------------------------------------------------------------
// Parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Names the parser resolves. Without a table every identifier becomes a
/// parameter symbol. With one, identifiers must be a coordinate, a parameter
/// or a definition (which is substituted in place).
struct SymbolTable {
  std::vector<std::string> coordinates;
  std::vector<std::string> parameters;
  std::map<std::string, Expr> definitions;
};

Expr parse(std::string_view source, const SymbolTable* symbols = nullptr);

// ---------------------------------------------------------------------------
// Calculus

/// Exact symbolic derivative. Shares one memo table across calls, so
/// differentiating many components built from common subtrees stays linear.
class Differentiator {
 public:
  /// Derivative with respect to coordinate `index` (named `name`).
  Differentiator(std::string name, int index);
  /// Derivative with respect to a parameter symbol.
  explicit Differentiator(std::string name);

  Expr operator()(const Expr& e);

 private:
  Expr derive(const Expr& e);

  std::string name_;
  int index_;
  std::unordered_map<const ExprNode*, Expr> memo_;
};

Expr differentiate(const Expr& e, const std::string& coordinate_name, int coordinate_index);
Expr differentiate(const Expr& e, const std::string& symbol_name);

/// Constant folding and identity elimination. Only rewrites that evaluate
/// bit-identically are applied.
Expr simplify(const Expr& e);

// ---------------------------------------------------------------------------
// Evaluation

using ParamEnv = std::map<std::string, double, std::less<>>;

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : std::runtime_error(what + ": " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

class UnboundSymbolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates expressions at one point, memoizing every visited node.
class Evaluator {
 public:
  Evaluator(std::vector<double> coordinates, ParamEnv params);

  double operator()(const Expr& e);
  std::span<const double> coordinates() const { return coordinates_; }
  const ParamEnv& params() const { return params_; }

 private:
  double eval(const Expr& e);

  std::vector<double> coordinates_;
  ParamEnv params_;
  std::unordered_map<const ExprNode*, double> cache_;
};

double evaluate(const Expr& e, std::span<const double> coordinates, const ParamEnv& params = {});

}  // namespace curvkit

#endif  // CURVKIT_EXPR_HPP
