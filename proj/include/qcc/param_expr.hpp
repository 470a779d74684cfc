#pragma once

#include <map>
#include <optional>
#include <string>

namespace qcc {

// Affine expression c0 + sum(ci * vi) over run-time REAL parameters.
class ParamExpr {
 public:
  static constexpr double kTolerance = 1e-12;

  ParamExpr() = default;
  ParamExpr(double constant) : constant_(constant) {}  // NOLINT: implicit by design
  static ParamExpr variable(const std::string& name, double coeff = 1.0);

  double constant() const { return constant_; }
  const std::map<std::string, double>& terms() const { return terms_; }

  bool is_concrete() const { return terms_.empty(); }
  // Throws if symbolic.
  double value() const;
  double evaluate(const std::map<std::string, double>& bindings) const;

  ParamExpr operator+(const ParamExpr& o) const;
  ParamExpr operator-(const ParamExpr& o) const;
  ParamExpr operator-() const;
  ParamExpr operator*(double k) const;
  ParamExpr& operator+=(const ParamExpr& o);

  bool operator==(const ParamExpr& o) const;
  bool operator!=(const ParamExpr& o) const { return !(*this == o); }

 private:
  void drop_zeros();

  double constant_ = 0.0;
  std::map<std::string, double> terms_;
};

inline ParamExpr operator*(double k, const ParamExpr& e) { return e * k; }

ParamExpr simplify_param(const ParamExpr& e);

// Real-number formatting: pi multiples when exact, otherwise shortest round-trip.
std::string format_real(double v);
std::string format_param(const ParamExpr& e);

}  // namespace qcc
