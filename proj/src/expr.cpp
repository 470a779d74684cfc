#include "qcc/expr.hpp"

#include <cmath>
#include <stdexcept>

namespace qcc {

ExprPtr Expr::make_number(std::complex<double> v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Number;
  e->number = v;
  return e;
}

ExprPtr Expr::make_variable(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Variable;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::make_unary(char op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unary;
  e->op = op;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::make_binary(char op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::make_call(std::string fn, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Call;
  e->name = std::move(fn);
  e->args = {std::move(a)};
  return e;
}

namespace {

std::complex<double> apply_function(const std::string& fn, std::complex<double> x) {
  if (fn == "sin") return std::sin(x);
  if (fn == "cos") return std::cos(x);
  if (fn == "sqrt") return std::sqrt(x);
  if (fn == "exp") return std::exp(x);
  if (fn == "cis") return std::exp(std::complex<double>(0, 1) * x);
  throw std::invalid_argument("unknown function " + fn);
}

}  // namespace

std::complex<double> evaluate(const Expr& e, const std::map<std::string, std::complex<double>>& env) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.number;
    case Expr::Kind::Variable: {
      auto it = env.find(e.name);
      if (it == env.end()) throw std::invalid_argument("unbound variable " + e.name);
      return it->second;
    }
    case Expr::Kind::Unary:
      return -evaluate(*e.args[0], env);
    case Expr::Kind::Call:
      return apply_function(e.name, evaluate(*e.args[0], env));
    case Expr::Kind::Binary: {
      auto a = evaluate(*e.args[0], env);
      auto b = evaluate(*e.args[1], env);
      switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
        default: break;
      }
    }
  }
  throw std::logic_error("malformed expression");
}

namespace {

// Complex-valued affine form used while folding; the result must be real.
struct Affine {
  std::complex<double> c;
  std::map<std::string, std::complex<double>> terms;
  bool concrete() const { return terms.empty(); }
};

std::optional<Affine> fold(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return Affine{e.number, {}};
    case Expr::Kind::Variable:
      return Affine{0.0, {{e.name, 1.0}}};
    case Expr::Kind::Unary: {
      auto a = fold(*e.args[0]);
      if (!a) return std::nullopt;
      a->c = -a->c;
      for (auto& [_, v] : a->terms) v = -v;
      return a;
    }
    case Expr::Kind::Call: {
      auto a = fold(*e.args[0]);
      if (!a || !a->concrete()) return std::nullopt;
      return Affine{apply_function(e.name, a->c), {}};
    }
    case Expr::Kind::Binary: {
      auto a = fold(*e.args[0]);
      auto b = fold(*e.args[1]);
      if (!a || !b) return std::nullopt;
      switch (e.op) {
        case '+':
        case '-': {
          const double s = e.op == '+' ? 1.0 : -1.0;
          a->c += s * b->c;
          for (const auto& [k, v] : b->terms) a->terms[k] += s * v;
          return a;
        }
        case '*': {
          if (!a->concrete() && !b->concrete()) return std::nullopt;
          if (!a->concrete()) std::swap(a, b);
          for (auto& [_, v] : b->terms) v *= a->c;
          b->c *= a->c;
          return b;
        }
        case '/': {
          if (!b->concrete()) return std::nullopt;
          for (auto& [_, v] : a->terms) v /= b->c;
          a->c /= b->c;
          return a;
        }
        case '^': {
          if (!a->concrete() || !b->concrete()) return std::nullopt;
          return Affine{std::pow(a->c, b->c), {}};
        }
        default:
          return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<ParamExpr> fold_affine(const Expr& e) {
  auto a = fold(e);
  if (!a) return std::nullopt;
  auto is_real = [](std::complex<double> z) { return std::abs(z.imag()) <= 1e-12; };
  if (!is_real(a->c)) return std::nullopt;
  ParamExpr out(a->c.real());
  for (const auto& [k, v] : a->terms) {
    if (!is_real(v)) return std::nullopt;
    out += ParamExpr::variable(k, v.real());
  }
  return out;
}

namespace {

int precedence(const Expr& e) {
  if (e.kind != Expr::Kind::Binary) return e.kind == Expr::Kind::Unary ? 3 : 5;
  switch (e.op) {
    case '+':
    case '-': return 1;
    case '*':
    case '/': return 2;
    default: return 4;
  }
}

std::string format_number(std::complex<double> z) {
  if (z.imag() == 0.0) return format_real(z.real());
  if (z.real() == 0.0) return format_real(z.imag()) + "i";
  return "(" + format_real(z.real()) + (z.imag() < 0 ? "-" : "+") + format_real(std::abs(z.imag())) + "i)";
}

}  // namespace

std::string format_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: {
      std::string s = format_number(e.number);
      // Compound pi forms such as 3*pi/4 need grouping inside larger expressions.
      if (s.find_first_of("*/") != std::string::npos && s.front() != '(') s = "(" + s + ")";
      return s;
    }
    case Expr::Kind::Variable:
      return e.name;
    case Expr::Kind::Call:
      return e.name + "(" + format_expr(*e.args[0]) + ")";
    case Expr::Kind::Unary: {
      std::string inner = format_expr(*e.args[0]);
      if (precedence(*e.args[0]) < 3) inner = "(" + inner + ")";
      return "-" + inner;
    }
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      std::string l = format_expr(*e.args[0]);
      std::string r = format_expr(*e.args[1]);
      if (precedence(*e.args[0]) < p) l = "(" + l + ")";
      if (precedence(*e.args[1]) <= p && !(e.op == '^' && precedence(*e.args[1]) > p)) {
        if (precedence(*e.args[1]) < p || e.op == '-' || e.op == '/' || e.op == '^') r = "(" + r + ")";
      }
      return l + std::string(" ") + e.op + " " + r;
    }
  }
  return {};
}

}  // namespace qcc
