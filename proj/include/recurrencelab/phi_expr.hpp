#pragma once

// Expression language for rate functions of one variable n:
//
//   sum     := product ('+' product)*
//   product := power ('*' power)*
//   power   := factor ('^' factor)?
//   factor  := number | 'n' | 'log' '(' sum ')' | '(' sum ')'
//
// '^' binds tighter than '*', which binds tighter than '+'. log is natural.

#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "recurrencelab/errors.hpp"

namespace recurrencelab
{

struct ExprNode
{
  enum class Op
  {
    number,
    var_n,
    log,
    add,
    mul,
    pow
  };

  Op op = Op::number;
  double value = 0.0;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

/// Point at which an expression is evaluated. `log_n` is carried separately so
/// that log(n) stays accurate when n itself overflows a double.
struct ExprPoint
{
  double n = 0.0;
  double log_n = 0.0;
};

inline double evaluate(const ExprNode& e, const ExprPoint& at)
{
  switch (e.op) {
  case ExprNode::Op::number:
    return e.value;
  case ExprNode::Op::var_n:
    return at.n;
  case ExprNode::Op::log:
    if (e.lhs->op == ExprNode::Op::var_n) return at.log_n;
    return std::log(evaluate(*e.lhs, at));
  case ExprNode::Op::add:
    return evaluate(*e.lhs, at) + evaluate(*e.rhs, at);
  case ExprNode::Op::mul:
    return evaluate(*e.lhs, at) * evaluate(*e.rhs, at);
  case ExprNode::Op::pow:
    return std::pow(evaluate(*e.lhs, at), evaluate(*e.rhs, at));
  }
  return std::nan("");
}

inline bool contains_log(const ExprNode& e)
{
  if (e.op == ExprNode::Op::log) return true;
  return (e.lhs && contains_log(*e.lhs)) || (e.rhs && contains_log(*e.rhs));
}

/// c * n^a * (log n)^b recognized structurally.
struct Monomial
{
  double c = 1.0;
  double a = 0.0;
  double b = 0.0;
};

inline std::optional<Monomial> as_monomial(const ExprNode& e)
{
  using Op = ExprNode::Op;
  switch (e.op) {
  case Op::number:
    if (!(e.value > 0.0)) return std::nullopt;
    return Monomial{e.value, 0.0, 0.0};
  case Op::var_n:
    return Monomial{1.0, 1.0, 0.0};
  case Op::log:
    if (e.lhs->op == Op::var_n) return Monomial{1.0, 0.0, 1.0};
    return std::nullopt;
  case Op::mul: {
    const auto l = as_monomial(*e.lhs);
    const auto r = as_monomial(*e.rhs);
    if (!l || !r) return std::nullopt;
    return Monomial{l->c * r->c, l->a + r->a, l->b + r->b};
  }
  case Op::pow: {
    if (e.rhs->op != Op::number) return std::nullopt;
    const auto base = as_monomial(*e.lhs);
    if (!base) return std::nullopt;
    const double k = e.rhs->value;
    return Monomial{std::pow(base->c, k), base->a * k, base->b * k};
  }
  case Op::add:
    return std::nullopt;
  }
  return std::nullopt;
}

namespace detail
{

class ExprParser
{
public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ExprPtr parse()
  {
    auto e = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  ExprPtr sum()
  {
    auto lhs = product();
    while (accept('+')) lhs = binary(ExprNode::Op::add, lhs, product());
    return lhs;
  }

  ExprPtr product()
  {
    auto lhs = power();
    while (accept('*')) lhs = binary(ExprNode::Op::mul, lhs, power());
    return lhs;
  }

  ExprPtr power()
  {
    auto base = factor();
    if (accept('^')) return binary(ExprNode::Op::pow, base, factor());
    return base;
  }

  ExprPtr factor()
  {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (text_.substr(pos_, 3) == "log") {
      pos_ += 3;
      expect('(');
      auto arg = sum();
      expect(')');
      auto node = std::make_shared<ExprNode>();
      node->op = ExprNode::Op::log;
      node->lhs = std::move(arg);
      return node;
    }
    if (c == 'n') {
      ++pos_;
      auto node = std::make_shared<ExprNode>();
      node->op = ExprNode::Op::var_n;
      return node;
    }
    if (c == '(') {
      ++pos_;
      auto inner = sum();
      expect(')');
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ExprPtr number()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw parse_error("malformed number '" + token + "'", start);
    }
    if (used != token.size()) throw parse_error("malformed number '" + token + "'", start);
    auto node = std::make_shared<ExprNode>();
    node->op = ExprNode::Op::number;
    node->value = v;
    return node;
  }

  static ExprPtr binary(ExprNode::Op op, ExprPtr lhs, ExprPtr rhs)
  {
    auto node = std::make_shared<ExprNode>();
    node->op = op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  void skip_space()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c)
  {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, pos_); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline ExprPtr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

} // namespace recurrencelab
