#include "qcc/param_expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcc {

ParamExpr ParamExpr::variable(const std::string& name, double coeff) {
  ParamExpr e;
  e.terms_[name] = coeff;
  e.drop_zeros();
  return e;
}

double ParamExpr::value() const {
  if (!is_concrete()) {
    throw std::logic_error("parameter expression is symbolic: " + format_param(*this));
  }
  return constant_;
}

double ParamExpr::evaluate(const std::map<std::string, double>& bindings) const {
  double v = constant_;
  for (const auto& [name, c] : terms_) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw std::invalid_argument("no value bound for parameter " + name);
    v += c * it->second;
  }
  return v;
}

ParamExpr& ParamExpr::operator+=(const ParamExpr& o) {
  constant_ += o.constant_;
  for (const auto& [name, c] : o.terms_) terms_[name] += c;
  drop_zeros();
  return *this;
}

ParamExpr ParamExpr::operator+(const ParamExpr& o) const {
  ParamExpr r = *this;
  r += o;
  return r;
}

ParamExpr ParamExpr::operator-() const { return *this * -1.0; }

ParamExpr ParamExpr::operator-(const ParamExpr& o) const { return *this + (-o); }

ParamExpr ParamExpr::operator*(double k) const {
  ParamExpr r;
  r.constant_ = constant_ * k;
  for (const auto& [name, c] : terms_) r.terms_[name] = c * k;
  r.drop_zeros();
  return r;
}

bool ParamExpr::operator==(const ParamExpr& o) const {
  if (std::abs(constant_ - o.constant_) > kTolerance) return false;
  if (terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  for (; a != terms_.end(); ++a, ++b) {
    if (a->first != b->first || std::abs(a->second - b->second) > kTolerance) return false;
  }
  return true;
}

void ParamExpr::drop_zeros() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= kTolerance) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

ParamExpr simplify_param(const ParamExpr& e) {
  // Storage is already canonical (ordered map, zeros dropped); rebuild to be safe.
  ParamExpr r(e.constant());
  for (const auto& [name, c] : e.terms()) r += ParamExpr::variable(name, c);
  return r;
}

namespace {

std::string shortest_decimal(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep numbers recognizably real (e.g. "2" is fine for Quil, "1e-05" too).
  return s;
}

std::optional<std::string> pi_multiple(double v) {
  static constexpr int kDenoms[] = {1, 2, 3, 4, 6, 8};
  const double r = v / std::numbers::pi;
  for (int d : kDenoms) {
    const double n = std::round(r * d);
    if (std::abs(n) > 64 || n == 0) continue;
    if (std::abs(v - n * std::numbers::pi / d) > 1e-12) continue;
    long num = static_cast<long>(n);
    long den = d;
    std::string out = num < 0 ? "-" : "";
    long an = std::labs(num);
    if (an != 1) out += std::to_string(an) + "*";
    out += "pi";
    if (den != 1) out += "/" + std::to_string(den);
    return out;
  }
  return std::nullopt;
}

std::string format_coefficient_term(const std::string& name, double c) {
  if (std::abs(c - 1.0) <= ParamExpr::kTolerance) return name;
  if (std::abs(c + 1.0) <= ParamExpr::kTolerance) return "-" + name;
  const double inv = 1.0 / std::abs(c);
  const double k = std::round(inv);
  if (k >= 2 && k <= 64 && std::abs(inv - k) < 1e-9 && std::abs(std::abs(c) - 1.0 / k) <= 1e-14) {
    return (c < 0 ? "-" : "") + name + "/" + std::to_string(static_cast<long>(k));
  }
  return format_real(c) + "*" + name;
}

}  // namespace

std::string format_real(double v) {
  if (v == 0.0 || std::abs(v) < 1e-300) return "0";
  if (auto p = pi_multiple(v)) return *p;
  return shortest_decimal(v);
}

std::string format_param(const ParamExpr& e) {
  std::string out;
  bool first = true;
  if (std::abs(e.constant()) > ParamExpr::kTolerance || e.terms().empty()) {
    out = format_real(e.is_concrete() ? e.constant() : e.constant());
    first = false;
  }
  for (const auto& [name, c] : e.terms()) {
    std::string t = format_coefficient_term(name, c);
    if (first) {
      out = t;
      first = false;
    } else if (t.front() == '-') {
      out += " - " + t.substr(1);
    } else {
      out += " + " + t;
    }
  }
  return out;
}

}  // namespace qcc
