#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcc/param_expr.hpp"

namespace qcc {

// Arithmetic expression tree as written in the source. Parameter positions are
// folded to ParamExpr; DEFGATE entries stay as trees and are evaluated per use.
struct Expr {
  enum class Kind { Number, Variable, Unary, Binary, Call };

  Kind kind = Kind::Number;
  std::complex<double> number;
  std::string name;  // variable or function name
  char op = 0;       // '+', '-', '*', '/', '^' for Binary; '-' for Unary
  std::vector<std::shared_ptr<const Expr>> args;

  static std::shared_ptr<const Expr> make_number(std::complex<double> v);
  static std::shared_ptr<const Expr> make_variable(std::string name);
  static std::shared_ptr<const Expr> make_unary(char op, std::shared_ptr<const Expr> a);
  static std::shared_ptr<const Expr> make_binary(char op, std::shared_ptr<const Expr> a,
                                                 std::shared_ptr<const Expr> b);
  static std::shared_ptr<const Expr> make_call(std::string fn, std::shared_ptr<const Expr> a);
};

using ExprPtr = std::shared_ptr<const Expr>;

// Complex evaluation. Unbound variables throw std::invalid_argument.
std::complex<double> evaluate(const Expr& e, const std::map<std::string, std::complex<double>>& env);

// Affine folding; returns nullopt when the expression is not affine in its
// variables or has a non-real constant part.
std::optional<ParamExpr> fold_affine(const Expr& e);

std::string format_expr(const Expr& e);

}  // namespace qcc
