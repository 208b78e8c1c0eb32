#ifndef COLEHOPF_PARSE_HPP
#define COLEHOPF_PARSE_HPP

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>

#include "colehopf/errors.hpp"
#include "colehopf/expr.hpp"

namespace colehopf {

namespace detail {

// Recursive-descent parser over the grammar
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'pi' | ident | fn '(' sum ')' | '(' sum ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      Expr rhs = parse_product();
      lhs = Expr::binary(c == '+' ? Op::Add : Op::Sub, lhs, rhs);
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      Expr rhs = parse_unary();
      lhs = Expr::binary(c == '*' ? Op::Mul : Op::Div, lhs, rhs);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek() == '-') {
      ++pos_;
      return Expr::neg(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek() == '^') {
      ++pos_;
      return Expr::binary(Op::Pow, base, parse_unary());
    }
    return base;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

  Expr parse_primary() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (is_digit(c)) return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      return pos_ > from;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      if (!digits()) fail("expected digits after '.'");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && is_digit(text_[look])) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (is_ident_start(text_[pos_]) || is_digit(text_[pos_]))) ++pos_;
    const std::string_view ident = text_.substr(start, pos_ - start);
    if (peek() == '(') {
      const auto fn = function_from_name(ident);
      if (!fn) throw ParseError("unknown function '" + std::string(ident) + "'", start);
      ++pos_;
      Expr arg = parse_sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return Expr::call(*fn, arg);
    }
    if (ident == "x") return Expr::var();
    if (ident == "pi") return Expr::pi();
    if (function_from_name(ident)) throw ParseError("function '" + std::string(ident) + "' needs '('", start);
    return Expr::param(std::string(ident));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`; throws ParseError carrying the byte offset of the failure.
[[nodiscard]] inline Expr parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace colehopf

#endif  // COLEHOPF_PARSE_HPP
