#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcc/chip.hpp"
#include "qcc/linalg.hpp"
#include "qcc/nativize.hpp"

namespace qcc {

// Tracked pure state of some qubits (qubits[0] is the most significant bit).
struct StateAnnotation {
  std::vector<int> qubits;
  Vector amplitudes;
};

struct RuleContext {
  const ChipSpecification* chip = nullptr;
  NativizeOptions options;
  const StateAnnotation* state = nullptr;
  bool state_prep = false;
};

// A gate shape: operator with either a fixed parameter or any value.
// The pseudo-operators below stand for "whatever native gates the chip has".
struct GateShape {
  std::string op;
  std::optional<double> param;
  bool operator<(const GateShape& o) const;
  bool operator==(const GateShape& o) const;
};
inline const std::string kNative1Q = "native-1q";
inline const std::string kNative2Q = "native-2q";

using RuleFn = std::function<std::optional<GateSeq>(std::span<const GateApplication>, const RuleContext&)>;

struct RewriteRule {
  std::string name;
  std::string summary;
  int input_arity = 1;               // 0 for variable-length windows
  std::vector<std::string> input_ops;  // per slot; empty string matches any gate
  int input_qubits = 0;                // qubit count of "any gate" slots (3 means 3 or more)
  std::vector<GateShape> outputs;
  bool state_aware = false;
  bool never_worse = false;  // output cost never exceeds input cost
  RuleFn apply;
};

enum class RuleClass { Nativizer, Optimizer, Neither };
std::string to_string(RuleClass c);

const std::vector<RewriteRule>& rule_catalog();
const RewriteRule& find_rule(const std::string& name);
RuleClass classify_rule(const RewriteRule& rule, const ChipSpecification& chip);

// Exact templates, exposed for the nativizer and tests.
GateSeq ccnot_template(int q0, int q1, int q2);
GateSeq cphase_template(const ParamExpr& theta, int a, int b);
GateSeq cnot_to_cz(int control, int target);
GateSeq cz_to_cnot(int a, int b);
GateSeq swap_to_cnots(int a, int b);

// Angle of a concrete rotation reduced to (-pi, pi].
double wrap_pi(double theta);
bool is_zero_angle(const ParamExpr& e);
bool is_diagonal_gate(const GateApplication& g);

}  // namespace qcc
