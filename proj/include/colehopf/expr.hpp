#ifndef COLEHOPF_EXPR_HPP
#define COLEHOPF_EXPR_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace colehopf {

enum class Op { Const, Pi, Var, Param, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Fn { Exp, Ln, Sin, Cos, Sinh, Cosh, Sqrt };

inline constexpr std::array<std::string_view, 7> kFunctionNames = {"exp", "ln", "sin", "cos",
                                                                   "sinh", "cosh", "sqrt"};

[[nodiscard]] inline std::string_view function_name(Fn fn) {
  return kFunctionNames[static_cast<std::size_t>(fn)];
}

[[nodiscard]] inline std::optional<Fn> function_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == name) return static_cast<Fn>(i);
  }
  return std::nullopt;
}

/// True for names usable as a Param: an identifier that is not "x", "pi"
/// or a function name.
[[nodiscard]] inline bool is_valid_param_name(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alpha(c) && !digit(c)) return false;
  }
  return name != "x" && name != "pi" && !function_from_name(name);
}

/// Immutable expression tree in one independent variable x.
///
/// An Expr is a cheap-to-copy handle onto a shared, never-mutated node, so
/// subtrees are freely shared between expressions. Constants are stored
/// non-negative: a negative literal is represented as Neg(Const(|v|)), which
/// is also exactly what the parser produces for "-v".
class Expr {
 public:
  /// The constant 0.
  Expr() : Expr(constant(0.0)) {}
  // Implicit so that formula templates can mix doubles and expressions.
  Expr(double v) : Expr(constant(v)) {}  // NOLINT(google-explicit-constructor)

  [[nodiscard]] static Expr constant(double v);
  [[nodiscard]] static Expr pi() { return Expr(make(Op::Pi)); }
  [[nodiscard]] static Expr var() { return Expr(make(Op::Var)); }
  [[nodiscard]] static Expr param(std::string name);
  [[nodiscard]] static Expr neg(Expr e);
  [[nodiscard]] static Expr binary(Op op, Expr lhs, Expr rhs);
  [[nodiscard]] static Expr call(Fn fn, Expr arg);

  [[nodiscard]] Op op() const noexcept { return node_->op; }
  [[nodiscard]] double value() const noexcept { return node_->value; }
  [[nodiscard]] const std::string& name() const noexcept { return node_->name; }
  [[nodiscard]] Fn fn() const noexcept { return node_->fn; }
  /// Operand of Neg/Call, left operand of a binary node.
  [[nodiscard]] const Expr& lhs() const { return *node_->lhs; }
  [[nodiscard]] const Expr& rhs() const { return *node_->rhs; }
  [[nodiscard]] const Expr& arg() const { return *node_->lhs; }

  [[nodiscard]] bool is_const() const noexcept { return op() == Op::Const; }
  [[nodiscard]] bool is_const(double v) const noexcept { return op() == Op::Const && value() == v; }
  [[nodiscard]] bool is_binary() const noexcept {
    return op() == Op::Add || op() == Op::Sub || op() == Op::Mul || op() == Op::Div || op() == Op::Pow;
  }

  /// Structural (not numeric) equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    std::string name;
    Fn fn = Fn::Exp;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static std::shared_ptr<Node> make(Op op) {
    auto n = std::make_shared<Node>();
    n->op = op;
    return n;
  }

  std::shared_ptr<const Node> node_;
};

inline Expr Expr::constant(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite constant");
  if (v < 0.0) return neg(constant(-v));
  auto n = make(Op::Const);
  n->value = v == 0.0 ? 0.0 : v;  // drops the sign of -0.0
  return Expr(std::move(n));
}

inline Expr Expr::param(std::string name) {
  if (!is_valid_param_name(name)) throw std::invalid_argument("invalid parameter name '" + name + "'");
  auto n = make(Op::Param);
  n->name = std::move(name);
  return Expr(std::move(n));
}

inline Expr Expr::neg(Expr e) {
  auto n = make(Op::Neg);
  n->lhs = std::make_shared<const Expr>(std::move(e));
  return Expr(std::move(n));
}

inline Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  auto n = make(op);
  n->lhs = std::make_shared<const Expr>(std::move(lhs));
  n->rhs = std::make_shared<const Expr>(std::move(rhs));
  return Expr(std::move(n));
}

inline Expr Expr::call(Fn fn, Expr arg) {
  auto n = make(Op::Call);
  n->fn = fn;
  n->lhs = std::make_shared<const Expr>(std::move(arg));
  return Expr(std::move(n));
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const: return a.value() == b.value();
    case Op::Pi:
    case Op::Var: return true;
    case Op::Param: return a.name() == b.name();
    case Op::Neg: return a.arg() == b.arg();
    case Op::Call: return a.fn() == b.fn() && a.arg() == b.arg();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// Raw tree builders. No simplification happens here; see simplify().
inline Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
inline Expr operator-(const Expr& a) { return Expr::neg(a); }
inline Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(Op::Pow, base, exponent); }
inline Expr exp(const Expr& e) { return Expr::call(Fn::Exp, e); }
inline Expr ln(const Expr& e) { return Expr::call(Fn::Ln, e); }
inline Expr sin(const Expr& e) { return Expr::call(Fn::Sin, e); }
inline Expr cos(const Expr& e) { return Expr::call(Fn::Cos, e); }
inline Expr sinh(const Expr& e) { return Expr::call(Fn::Sinh, e); }
inline Expr cosh(const Expr& e) { return Expr::call(Fn::Cosh, e); }
inline Expr sqrt(const Expr& e) { return Expr::call(Fn::Sqrt, e); }

namespace detail {

// Binding strength of the grammar levels: sum < product < unary minus < power < atom.
enum class Level { Sum = 0, Product = 1, Unary = 2, Power = 3, Atom = 4 };

inline Level level_of(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return Level::Sum;
    case Op::Mul:
    case Op::Div: return Level::Product;
    case Op::Neg: return Level::Unary;
    case Op::Pow: return Level::Power;
    default: return Level::Atom;
  }
}

// Shortest text that reads back as the same double.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void print_to(const Expr& e, std::string& out);

inline void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print_to(e, out);
  if (wrap) out += ')';
}

inline void print_to(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Const: out += format_number(e.value()); return;
    case Op::Pi: out += "pi"; return;
    case Op::Var: out += 'x'; return;
    case Op::Param: out += e.name(); return;
    case Op::Neg:
      out += '-';
      print_wrapped(e.arg(), level_of(e.arg()) < Level::Unary, out);
      return;
    case Op::Call:
      out += function_name(e.fn());
      print_wrapped(e.arg(), true, out);
      return;
    case Op::Add:
    case Op::Sub:
      print_to(e.lhs(), out);
      out += e.op() == Op::Add ? " + " : " - ";
      print_wrapped(e.rhs(), level_of(e.rhs()) <= Level::Sum, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_wrapped(e.lhs(), level_of(e.lhs()) < Level::Product, out);
      out += e.op() == Op::Mul ? '*' : '/';
      print_wrapped(e.rhs(), level_of(e.rhs()) <= Level::Product, out);
      return;
    case Op::Pow:
      // Base must be an atom; the exponent is parsed at unary level (right-associative).
      print_wrapped(e.lhs(), level_of(e.lhs()) < Level::Atom, out);
      out += '^';
      print_wrapped(e.rhs(), level_of(e.rhs()) < Level::Unary, out);
      return;
  }
}

}  // namespace detail

/// Textual form in the parser's grammar; parse(to_string(e)) == e structurally.
[[nodiscard]] inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_to(e, out);
  return out;
}

}  // namespace colehopf

#endif  // COLEHOPF_EXPR_HPP
