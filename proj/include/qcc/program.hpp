#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcc/expr.hpp"
#include "qcc/param_expr.hpp"

namespace qcc {

struct MemoryRef {
  std::string name;
  int index = 0;
  // Written as `name[index]` in the source (otherwise bare `name`).
  bool indexed = true;

  bool operator==(const MemoryRef& o) const { return name == o.name && index == o.index; }
  bool operator<(const MemoryRef& o) const {
    return name != o.name ? name < o.name : index < o.index;
  }
};

struct GateApplication {
  std::string name;
  std::vector<ParamExpr> params;
  std::vector<int> qubits;

  bool operator==(const GateApplication&) const = default;
  bool is_concrete() const;
};

struct Measure {
  int qubit = 0;
  MemoryRef target;
  bool operator==(const Measure&) const = default;
};

struct MeasureDiscard {
  int qubit = 0;
  bool operator==(const MeasureDiscard&) const = default;
};

struct Label {
  std::string name;
  bool operator==(const Label&) const = default;
};

struct Jump {
  std::string label;
  bool operator==(const Jump&) const = default;
};

struct JumpWhen {
  std::string label;
  MemoryRef condition;
  bool operator==(const JumpWhen&) const = default;
};

struct JumpUnless {
  std::string label;
  MemoryRef condition;
  bool operator==(const JumpUnless&) const = default;
};

struct Pragma {
  std::string text;
  bool operator==(const Pragma&) const = default;
};

// Unexpanded use of a DEFCIRCUIT (or a not-yet-resolved name inside a body).
// Operands stay textual because formals may stand for qubits or memory.
struct CircuitCall {
  std::string name;
  std::vector<ExprPtr> params;
  std::vector<std::string> operands;
  int line = 0;
  bool operator==(const CircuitCall& o) const;
};

using Instruction = std::variant<GateApplication, Measure, MeasureDiscard, Label, Jump, JumpWhen,
                                 JumpUnless, Pragma, CircuitCall>;

enum class DataType { Bit, Real };

struct Declaration {
  std::string name;
  DataType type = DataType::Bit;
  int length = 1;
  // Whether the source wrote an explicit `[n]`.
  bool explicit_length = false;
  bool operator==(const Declaration&) const = default;
};

struct GateDefinition {
  std::string name;
  std::vector<std::string> params;
  int dimension = 0;
  std::vector<ExprPtr> entries;  // row-major, dimension * dimension
  int arity() const;
};

struct CircuitDefinition {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> formals;
  // Body lines as written (trimmed); parsed after formal substitution.
  std::vector<std::string> body;
  int line = 0;
};

struct Program {
  std::vector<Declaration> declarations;
  std::map<std::string, GateDefinition> gate_definitions;
  std::map<std::string, CircuitDefinition> circuit_definitions;
  std::vector<Instruction> body;

  const Declaration* find_declaration(const std::string& name) const;
};

// Qubits touched by an instruction (empty for classical-only instructions).
std::vector<int> instruction_qubits(const Instruction& instr);
bool is_gate(const Instruction& instr);
bool is_control_flow(const Instruction& instr);

bool structurally_equal(const Program& a, const Program& b);

}  // namespace qcc
