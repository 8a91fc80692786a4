#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/errors.hpp"
#include "subdiff/mesh.hpp"

namespace subdiff {

/// Parse failure with the byte offset of the offending token.
class ExprError : public InputError {
 public:
  ExprError(const std::string& msg, std::size_t offset)
      : InputError(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Syntax tree node. Immutable once built; subtrees are shared.
struct ExprNode {
  enum class Kind { Number, VarX, VarY, Pi, Negate, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sin, Cos, Exp, Abs, Sqrt, Tri, Chi };

  Kind kind = Kind::Number;
  double number = 0.0;
  Func func = Func::Sin;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

/// Scalar field given by an expression in x, y and pi with + - * / ^,
/// unary minus, sin cos exp abs sqrt, tri(s) (triangle wave, period 2,
/// range [0,1]) and chi(a,b,s) (indicator of [a,b]).
///
/// Precedence from tight to loose: ^ (right-associative), unary -, * /, + -.
/// Thus -x^2 is -(x^2) and 2^-1 is 0.5.
class FieldExpr {
 public:
  FieldExpr() = default;
  static FieldExpr parse(std::string_view text);
  static FieldExpr constant(double value);

  const std::string& source() const { return source_; }
  double operator()(double x, double y = 0.0) const;
  double operator()(const Point& p) const { return (*this)(p.x, p.y); }
  SpatialFunction as_function() const;

  /// Fully parenthesised form; parse(to_string()) reproduces the tree.
  std::string to_string() const;
  const ExprNode& root() const { return *root_; }
  bool valid() const { return root_ != nullptr; }

 private:
  std::string source_;
  std::shared_ptr<const ExprNode> root_;
};

FieldExpr parse_field_expr(std::string_view text);

/// Structural equality of two trees (numbers compared exactly).
bool same_tree(const ExprNode& a, const ExprNode& b);

/// 1 - |(s mod 2) - 1|: zero at even integers, one at odd integers.
double triangle_wave(double s);

}  // namespace subdiff
