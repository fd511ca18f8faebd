#pragma once

// Expression language for metrics, warping functions, structure tensors and
// immersions.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//
// '^' is right-associative and binds tighter than unary minus on its left,
// so "-2^2" is -(2^2) = -4 while "2^-1" is 0.5. Identifiers are x1..xn
// (chart coordinates), p1..pk (parameters) and the functions sin, cos, exp,
// ln, sqrt. Numbers are decimal with an optional exponent. There is no
// implicit multiplication: "2x1" is rejected.
//
// This grammar is a stability contract for configuration files.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "warpcheck/errors.hpp"
#include "warpcheck/jets.hpp"

namespace warpcheck {

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string found)
      : Error("parse error at offset " + std::to_string(offset) + ": expected " + expected +
              ", found " + found),
        offset_(offset),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string found_;
};

/// Byte range of a node in its source text.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// A jet-domain error raised while evaluating an expression, tagged with the
/// span of the sub-expression that failed.
class ExprDomainError : public JetDomainError {
 public:
  ExprDomainError(const JetDomainError& inner, SourceSpan span)
      : JetDomainError(inner.op(), inner.value()), span_(span) {}
  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

enum class NodeKind { Number, Variable, Parameter, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Ln, Sqrt };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;
  int index = 0;  // 0-based variable / parameter index
  Func func = Func::Sin;
  std::shared_ptr<const Node> lhs;  // operand for unary nodes and calls
  std::shared_ptr<const Node> rhs;
  SourceSpan span;
};

using NodePtr = std::shared_ptr<const Node>;

namespace detail {

inline bool same_tree(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Number: return a->number == b->number;
    case NodeKind::Variable:
    case NodeKind::Parameter: return a->index == b->index;
    case NodeKind::Call: return a->func == b->func && same_tree(a->lhs.get(), b->lhs.get());
    case NodeKind::Negate: return same_tree(a->lhs.get(), b->lhs.get());
    default: return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
  }
}

inline NodePtr make_node(NodeKind kind, SourceSpan span, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->span = span;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

}  // namespace detail

/// Immutable parsed expression over a chart of dimension `dim` with
/// `n_params` parameters. Copies share the tree.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, int dim, int n_params, std::string source = {})
      : root_(std::move(root)), dim_(dim), n_params_(n_params), source_(std::move(source)) {}

  static Expr number(double c, int dim, int n_params = 0) {
    auto n = std::make_shared<Node>();
    n->number = c;
    return Expr(n, dim, n_params);
  }

  const Node* root() const noexcept { return root_.get(); }
  const NodePtr& root_ptr() const noexcept { return root_; }
  int dim() const noexcept { return dim_; }
  int n_params() const noexcept { return n_params_; }
  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return root_ == nullptr; }

  /// Structural equality of the syntax trees (spans ignored).
  friend bool operator==(const Expr& a, const Expr& b) { return detail::same_tree(a.root(), b.root()); }

  bool uses_variable(int i) const { return uses_variable(root(), i); }

  /// True when the tree is a literal zero.
  bool is_zero_literal() const {
    return root_ && root_->kind == NodeKind::Number && root_->number == 0.0;
  }

  /// Re-homes the expression on a larger chart: variable i becomes i + offset.
  Expr shift_variables(int offset, int new_dim) const {
    return Expr(shift(root_, offset), new_dim, n_params_, source_);
  }

 private:
  static bool uses_variable(const Node* n, int i) {
    if (!n) return false;
    if (n->kind == NodeKind::Variable) return n->index == i;
    return uses_variable(n->lhs.get(), i) || uses_variable(n->rhs.get(), i);
  }

  static NodePtr shift(const NodePtr& n, int offset) {
    if (!n) return n;
    auto copy = std::make_shared<Node>(*n);
    if (copy->kind == NodeKind::Variable) copy->index += offset;
    copy->lhs = shift(n->lhs, offset);
    copy->rhs = shift(n->rhs, offset);
    return copy;
  }

  NodePtr root_;
  int dim_ = 0;
  int n_params_ = 0;
  std::string source_;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

class Parser {
 public:
  Parser(std::string_view text, int dim, int n_params) : text_(text), dim_(dim), n_params_(n_params) {
    advance();
  }

  NodePtr parse_all() {
    NodePtr e = expr();
    if (tok_.kind != Tok::End) fail("operator or end of input");
    return e;
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(tok_.offset, expected, describe(tok_));
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + std::string(t.text) + "'";
  }

  void advance() {
    std::size_t i = pos_;
    while (i < text_.size() && (text_[i] == ' ' || text_[i] == '\t' || text_[i] == '\n' || text_[i] == '\r')) {
      ++i;
    }
    tok_ = Token{};
    tok_.offset = i;
    if (i >= text_.size()) {
      tok_.kind = Tok::End;
      pos_ = i;
      return;
    }
    const char c = text_[i];
    if (is_digit(c) || c == '.') {
      lex_number(i);
      return;
    }
    if (is_alpha(c)) {
      std::size_t j = i;
      while (j < text_.size() && (is_alpha(text_[j]) || is_digit(text_[j]))) ++j;
      tok_.kind = Tok::Ident;
      tok_.text = text_.substr(i, j - i);
      pos_ = j;
      return;
    }
    tok_.text = text_.substr(i, 1);
    pos_ = i + 1;
    switch (c) {
      case '+': tok_.kind = Tok::Plus; return;
      case '-': tok_.kind = Tok::Minus; return;
      case '*': tok_.kind = Tok::Star; return;
      case '/': tok_.kind = Tok::Slash; return;
      case '^': tok_.kind = Tok::Caret; return;
      case '(': tok_.kind = Tok::LParen; return;
      case ')': tok_.kind = Tok::RParen; return;
      default: {
        // Report the whole UTF-8 sequence of an unexpected character.
        std::size_t j = i + 1;
        while (j < text_.size() && (static_cast<unsigned char>(text_[j]) & 0xC0U) == 0x80U) ++j;
        tok_.text = text_.substr(i, j - i);
        throw ParseError(i, "expression", "'" + std::string(tok_.text) + "'");
      }
    }
  }

  void lex_number(std::size_t start) {
    std::size_t j = start;
    int dots = 0, digits = 0;
    while (j < text_.size() && (is_digit(text_[j]) || text_[j] == '.')) {
      if (text_[j] == '.') ++dots; else ++digits;
      ++j;
    }
    bool ok = dots <= 1 && digits > 0;
    if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      std::size_t exp_digits = 0;
      while (k < text_.size() && is_digit(text_[k])) {
        ++k;
        ++exp_digits;
      }
      if (exp_digits == 0) ok = false;
      j = k;
    }
    // A number running straight into an identifier character is malformed ("1e", "3.5x").
    const std::string_view lexeme = text_.substr(start, j - start);
    double value = 0.0;
    if (ok) {
      auto res = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
      ok = res.ec == std::errc() && res.ptr == lexeme.data() + lexeme.size() && std::isfinite(value);
    }
    if (!ok) throw ParseError(start, "well-formed number", "'" + std::string(lexeme) + "'");
    tok_.kind = Tok::Number;
    tok_.text = lexeme;
    tok_.number = value;
    pos_ = j;
  }

  SourceSpan span_from(std::size_t start) const {
    return SourceSpan{start, prev_end_ > start ? prev_end_ - start : 0};
  }

  void consume() {
    prev_end_ = tok_.offset + tok_.text.size();
    advance();
  }

  NodePtr expr() {
    const std::size_t start = tok_.offset;
    NodePtr lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const NodeKind k = tok_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
      consume();
      NodePtr rhs = term();
      lhs = make_node(k, span_from(start), lhs, rhs);
    }
    return lhs;
  }

  NodePtr term() {
    const std::size_t start = tok_.offset;
    NodePtr lhs = unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const NodeKind k = tok_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
      consume();
      NodePtr rhs = unary();
      lhs = make_node(k, span_from(start), lhs, rhs);
    }
    return lhs;
  }

  NodePtr unary() {
    if (tok_.kind == Tok::Minus) {
      const std::size_t start = tok_.offset;
      consume();
      NodePtr operand = unary();
      return make_node(NodeKind::Negate, span_from(start), operand);
    }
    return power();
  }

  NodePtr power() {
    const std::size_t start = tok_.offset;
    NodePtr base = atom();
    if (tok_.kind == Tok::Caret) {
      consume();
      NodePtr exponent = unary();
      return make_node(NodeKind::Pow, span_from(start), base, exponent);
    }
    return base;
  }

  NodePtr atom() {
    const std::size_t start = tok_.offset;
    switch (tok_.kind) {
      case Tok::Number: {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Number;
        n->number = tok_.number;
        consume();
        n->span = span_from(start);
        return n;
      }
      case Tok::LParen: {
        consume();
        NodePtr inner = expr();
        if (tok_.kind != Tok::RParen) fail("')'");
        consume();
        return inner;
      }
      case Tok::Ident: return identifier();
      default: fail("atom");
    }
  }

  NodePtr identifier() {
    const std::size_t start = tok_.offset;
    const std::string_view name = tok_.text;
    static constexpr std::pair<std::string_view, Func> kFuncs[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos}, {"exp", Func::Exp}, {"ln", Func::Ln}, {"sqrt", Func::Sqrt}};
    for (const auto& [fname, f] : kFuncs) {
      if (name == fname) {
        consume();
        if (tok_.kind != Tok::LParen) fail("'(' after function name");
        consume();
        NodePtr arg = expr();
        if (tok_.kind != Tok::RParen) fail("')'");
        consume();
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Call;
        n->func = f;
        n->lhs = arg;
        n->span = span_from(start);
        return n;
      }
    }
    if ((name[0] == 'x' || name[0] == 'p') && name.size() > 1) {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) all_digits = all_digits && is_digit(name[i]);
      if (all_digits) {
        int idx = 0;
        auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        const bool is_var = name[0] == 'x';
        const int limit = is_var ? dim_ : n_params_;
        if (res.ec != std::errc() || idx < 1 || idx > limit) {
          throw ParseError(start,
                           is_var ? "variable x1..x" + std::to_string(dim_)
                                  : "parameter p1..p" + std::to_string(n_params_),
                           "'" + std::string(name) + "' (index out of range)");
        }
        auto n = std::make_shared<Node>();
        n->kind = is_var ? NodeKind::Variable : NodeKind::Parameter;
        n->index = idx - 1;
        consume();
        n->span = span_from(start);
        return n;
      }
    }
    throw ParseError(start, "known identifier", "'" + std::string(name) + "' (unknown identifier)");
  }

  std::string_view text_;
  int dim_;
  int n_params_;
  std::size_t pos_ = 0;
  std::size_t prev_end_ = 0;
  Token tok_;
};

}  // namespace detail

/// Parses `text` as an expression over x1..x<dim> and p1..p<n_params>.
/// Throws ParseError on any non-grammatical input.
inline Expr parse(std::string_view text, int dim, int n_params = 0) {
  if (dim < 0 || n_params < 0) throw InvalidArgument("parse: negative dimension");
  detail::Parser p(text, dim, n_params);
  return Expr(p.parse_all(), dim, n_params, std::string(text));
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace detail {

// Binding levels: 0 sum, 1 product, 2 unary, 3 power, 4 atom.
inline int level(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 0;
    case NodeKind::Mul:
    case NodeKind::Div: return 1;
    case NodeKind::Negate: return 2;
    case NodeKind::Pow: return 3;
    default: return 4;
  }
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string print(const Node& n, int ctx) {
  std::string s;
  switch (n.kind) {
    case NodeKind::Number: s = format_number(n.number); break;
    case NodeKind::Variable: s = "x" + std::to_string(n.index + 1); break;
    case NodeKind::Parameter: s = "p" + std::to_string(n.index + 1); break;
    case NodeKind::Negate: s = "-" + print(*n.lhs, 2); break;
    case NodeKind::Add: s = print(*n.lhs, 0) + " + " + print(*n.rhs, 1); break;
    case NodeKind::Sub: s = print(*n.lhs, 0) + " - " + print(*n.rhs, 1); break;
    case NodeKind::Mul: s = print(*n.lhs, 1) + "*" + print(*n.rhs, 2); break;
    case NodeKind::Div: s = print(*n.lhs, 1) + "/" + print(*n.rhs, 2); break;
    case NodeKind::Pow: s = print(*n.lhs, 4) + "^" + print(*n.rhs, 2); break;
    case NodeKind::Call: s = std::string(func_name(n.func)) + "(" + print(*n.lhs, 0) + ")"; break;
  }
  return level(n) < ctx ? "(" + s + ")" : s;
}

}  // namespace detail

/// Canonical text of an expression with the minimal parentheses needed to
/// reparse to the same tree.
inline std::string pretty_print(const Expr& e) {
  if (e.empty()) return {};
  return detail::print(*e.root(), 0);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

struct ScalarOps {
  using T = double;
  static double lift(double c, const double&) { return c; }
  static double apply(Func f, double a) {
    switch (f) {
      case Func::Sin: return std::sin(a);
      case Func::Cos: return std::cos(a);
      case Func::Exp: return std::exp(a);
      case Func::Ln:
        if (!(a > 0.0)) throw JetDomainError("ln", a);
        return std::log(a);
      case Func::Sqrt:
        if (!(a > 0.0)) throw JetDomainError("sqrt", a);
        return std::sqrt(a);
    }
    return 0.0;
  }
  static double div(double a, double b) {
    if (b == 0.0) throw JetDomainError("/", b);
    return a / b;
  }
  static double power(double a, double b) {
    const bool integral = std::floor(b) == b;
    if (!integral && !(a > 0.0)) throw JetDomainError("pow", a);
    const double r = std::pow(a, b);
    if (!std::isfinite(r)) throw JetDomainError("pow", a);
    return r;
  }
};

struct JetOps {
  using T = Jet3;
  static Jet3 lift(double c, const Jet3& like) { return Jet3(c, like.dim(), like.order()); }
  static Jet3 apply(Func f, const Jet3& a) {
    switch (f) {
      case Func::Sin: return warpcheck::sin(a);
      case Func::Cos: return warpcheck::cos(a);
      case Func::Exp: return warpcheck::exp(a);
      case Func::Ln: return warpcheck::log(a);
      case Func::Sqrt: return warpcheck::sqrt(a);
    }
    return a;
  }
  static Jet3 div(const Jet3& a, const Jet3& b) { return a / b; }
  static Jet3 power(const Jet3& a, const Jet3& b) { return warpcheck::pow(a, b); }
};

template <typename Ops>
typename Ops::T eval_node(const Node& n, std::span<const typename Ops::T> vars,
                          std::span<const double> params) {
  using T = typename Ops::T;
  try {
    switch (n.kind) {
      case NodeKind::Number: return Ops::lift(n.number, vars[0]);
      case NodeKind::Variable: return vars[static_cast<std::size_t>(n.index)];
      case NodeKind::Parameter: return Ops::lift(params[static_cast<std::size_t>(n.index)], vars[0]);
      case NodeKind::Negate: return -eval_node<Ops>(*n.lhs, vars, params);
      case NodeKind::Call: return Ops::apply(n.func, eval_node<Ops>(*n.lhs, vars, params));
      default: break;
    }
    T a = eval_node<Ops>(*n.lhs, vars, params);
    T b = eval_node<Ops>(*n.rhs, vars, params);
    switch (n.kind) {
      case NodeKind::Add: return a + b;
      case NodeKind::Sub: return a - b;
      case NodeKind::Mul: return a * b;
      case NodeKind::Div: return Ops::div(a, b);
      case NodeKind::Pow: return Ops::power(a, b);
      default: return a;
    }
  } catch (const ExprDomainError&) {
    throw;
  } catch (const JetDomainError& e) {
    throw ExprDomainError(e, n.span);
  }
}

inline void check_eval_args(const Expr& e, std::size_t n_vars, std::size_t n_params) {
  if (e.empty()) throw InvalidArgument("evaluating an empty expression");
  if (static_cast<int>(n_vars) != e.dim() || e.dim() == 0) {
    throw InvalidArgument("expression evaluated with the wrong number of variables");
  }
  if (static_cast<int>(n_params) < e.n_params()) {
    throw InvalidArgument("expression evaluated with too few parameters");
  }
}

}  // namespace detail

/// Evaluates with arbitrary jets substituted for x1..xn (composition).
inline Jet3 eval_expr(const Expr& e, std::span<const Jet3> vars, std::span<const double> params = {}) {
  detail::check_eval_args(e, vars.size(), params.size());
  return detail::eval_node<detail::JetOps>(*e.root(), vars, params);
}

/// Jet of the denoted function at x.
inline Jet3 eval_expr(const Expr& e, const Point& x, std::span<const double> params = {}) {
  if (x.dim() != e.dim()) throw InvalidArgument("eval_expr: point dimension mismatch");
  const auto vars = jet_vars(x);
  return eval_expr(e, std::span<const Jet3>(vars), params);
}

/// Plain value at x.
inline double eval_value(const Expr& e, std::span<const double> x, std::span<const double> params = {}) {
  detail::check_eval_args(e, x.size(), params.size());
  return detail::eval_node<detail::ScalarOps>(*e.root(), x, params);
}

}  // namespace warpcheck
