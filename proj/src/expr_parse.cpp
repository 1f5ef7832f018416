#include <cctype>
#include <cstdlib>

#include "curvkit/expr.hpp"

namespace curvkit {

namespace {

// Recursive descent over
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' exponent)?
//   base   := number | symbol | func '(' expr ')' | '(' expr ')'
// Unary minus binds looser than '^', so -x^2 is -(x^2). A '-' directly
// followed by a number that is not raised to a power is a negative literal.
class Parser {
 public:
  Parser(std::string_view src, const SymbolTable* symbols) : src_(src), symbols_(symbols) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  Expr parse_expr() {
    std::vector<Expr> terms{parse_term()};
    while (true) {
      if (peek('+')) {
        ++pos_;
        terms.push_back(parse_term());
      } else if (peek('-')) {
        ++pos_;
        terms.push_back(Expr::raw(ExprKind::Neg, {parse_term()}));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : Expr::raw(ExprKind::Add, std::move(terms));
  }

  Expr parse_term() {
    std::vector<Expr> factors{parse_factor()};
    while (true) {
      if (peek('*')) {
        ++pos_;
        factors.push_back(parse_factor());
      } else if (peek('/')) {
        ++pos_;
        Expr lhs = factors.size() == 1 ? factors[0] : Expr::raw(ExprKind::Mul, std::move(factors));
        factors = {Expr::raw(ExprKind::Div, {lhs, parse_factor()})};
      } else {
        break;
      }
    }
    return factors.size() == 1 ? factors[0] : Expr::raw(ExprKind::Mul, std::move(factors));
  }

  Expr parse_factor() {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '-') {
      ++pos_;
      if (at_number_start()) {
        Expr literal = parse_number();
        if (!peek('^')) return Expr::constant(-literal.value());
        return Expr::raw(ExprKind::Neg, {parse_power(literal)});
      }
      return Expr::raw(ExprKind::Neg, {parse_factor()});
    }
    return parse_power(parse_base());
  }

  Expr parse_power(Expr base) {
    if (!peek('^')) return base;
    ++pos_;
    skip_ws();
    if (peek('(')) {
      ++pos_;
      Expr ex = parse_expr();
      expect(')');
      return Expr::raw(ExprKind::Pow, {base, ex});
    }
    const std::size_t start = pos_;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) ++pos_;
    if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      fail("expected an integer or a parenthesized exponent");
    }
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const double ex = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr);
    return Expr::raw(ExprKind::Pow, {base, Expr::constant(ex)});
  }

  bool at_number_start() const {
    if (pos_ >= src_.size()) return false;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [this] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr);
    return Expr::constant(v);
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (at_number_start()) return parse_number();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(src_.substr(start, pos_ - start));
      if (peek('(')) return parse_call(name, start);
      return resolve(name, start);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_call(const std::string& name, std::size_t at) {
    ExprKind kind;
    if (name == "exp") {
      kind = ExprKind::Exp;
    } else if (name == "ln") {
      kind = ExprKind::Ln;
    } else if (name == "sin") {
      kind = ExprKind::Sin;
    } else if (name == "cos") {
      kind = ExprKind::Cos;
    } else if (name == "sqrt") {
      kind = ExprKind::Sqrt;
    } else {
      fail_at("unknown function '" + name + "'", at);
    }
    expect('(');
    Expr arg = parse_expr();
    expect(')');
    return Expr::raw(kind, {arg});
  }

  Expr resolve(const std::string& name, std::size_t at) const {
    if (symbols_ == nullptr) return Expr::parameter(name);
    for (std::size_t i = 0; i < symbols_->coordinates.size(); ++i) {
      if (symbols_->coordinates[i] == name) return Expr::coordinate(name, static_cast<int>(i));
    }
    for (const auto& p : symbols_->parameters) {
      if (p == name) return Expr::parameter(name);
    }
    if (auto it = symbols_->definitions.find(name); it != symbols_->definitions.end()) return it->second;
    fail_at("unknown symbol '" + name + "'", at);
  }

  std::string_view src_;
  const SymbolTable* symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source, const SymbolTable* symbols) {
  Parser p(source, symbols);
  return p.parse_all();
}

}  // namespace curvkit
