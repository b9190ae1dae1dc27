#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>

#include "stieltjes/error.hpp"

namespace stieltjes {

/// Scalar expression in one variable named g.
///
/// Grammar: literals, g, + - * / ^ (right associative, binds tighter than
/// unary minus), parentheses, and the functions sin cos exp abs.
class Expression {
 public:
  using Fn = std::function<double(double)>;

  explicit Expression(std::string text) : text_(std::move(text)) {
    pos_ = 0;
    fn_ = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  double operator()(double g) const { return fn_(g); }
  const Fn& function() const { return fn_; }
  const std::string& text() const { return text_; }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw spec_error("expression '" + text_ + "': " + why + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn parse_sum() {
    Fn lhs = parse_product();
    for (;;) {
      if (eat('+')) {
        Fn rhs = parse_product();
        lhs = [lhs, rhs](double g) { return lhs(g) + rhs(g); };
      } else if (eat('-')) {
        Fn rhs = parse_product();
        lhs = [lhs, rhs](double g) { return lhs(g) - rhs(g); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_product() {
    Fn lhs = parse_unary();
    for (;;) {
      if (eat('*')) {
        Fn rhs = parse_unary();
        lhs = [lhs, rhs](double g) { return lhs(g) * rhs(g); };
      } else if (eat('/')) {
        Fn rhs = parse_unary();
        lhs = [lhs, rhs](double g) { return lhs(g) / rhs(g); };
      } else {
        return lhs;
      }
    }
  }

  Fn parse_unary() {
    if (eat('-')) {
      Fn e = parse_unary();
      return [e](double g) { return -e(g); };
    }
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  Fn parse_power() {
    Fn base = parse_primary();
    if (eat('^')) {
      Fn ex = parse_unary();
      return [base, ex](double g) { return std::pow(base(g), ex(g)); };
    }
    return base;
  }

  Fn parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end");
    if (eat('(')) {
      Fn e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(start, &end);
      if (end == start) fail("bad number");
      pos_ += static_cast<std::size_t>(end - start);
      return [v](double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t s = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string id = text_.substr(s, pos_ - s);
      if (id == "g") return [](double g) { return g; };
      double (*f)(double) = nullptr;
      if (id == "sin") f = [](double v) { return std::sin(v); };
      else if (id == "cos") f = [](double v) { return std::cos(v); };
      else if (id == "exp") f = [](double v) { return std::exp(v); };
      else if (id == "abs") f = [](double v) { return std::abs(v); };
      else fail("unknown identifier '" + id + "'");
      if (!eat('(')) fail("expected '(' after " + id);
      Fn arg = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return [f, arg](double g) { return f(arg(g)); };
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
  Fn fn_;
};

}  // namespace stieltjes
