#pragma once

// Evaluation of the small exact-number grammar accepted in configuration
// files: decimal/rational literals, sqrt(<positive integer>), + - * / and
// parentheses. Evaluation happens in long double before rounding to double.

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include "meyer/error.hpp"

namespace meyer {

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  long double parse() {
    long double v = expression();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError,
                "expression '" + std::string(src_) + "' at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  long double expression() {
    long double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  long double term() {
    long double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        long double d = unary();
        if (d == 0.0L) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  long double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }

  long double primary() {
    skip_ws();
    if (accept('(')) {
      long double v = expression();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (src_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      if (!accept('(')) fail("expected '(' after sqrt");
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("sqrt takes a positive integer literal");
      long double arg = std::stold(std::string(src_.substr(start, pos_ - start)));
      if (arg <= 0.0L) fail("sqrt argument must be positive");
      if (!accept(')')) fail("expected ')'");
      return std::sqrt(arg);
    }
    return number();
  }

  long double number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (start == pos_) fail("expected a number");
    try {
      return std::stold(std::string(src_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
};

}  // namespace detail

/// Evaluates an exact-number expression such as "(1+sqrt(5))/2".
inline double eval_expression(std::string_view src) {
  return static_cast<double>(detail::ExprParser(src).parse());
}

inline long double eval_expression_ld(std::string_view src) { return detail::ExprParser(src).parse(); }

}  // namespace meyer
