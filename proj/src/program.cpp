#include "qcc/program.hpp"

#include <bit>

namespace qcc {

bool GateApplication::is_concrete() const {
  for (const auto& p : params) {
    if (!p.is_concrete()) return false;
  }
  return true;
}

bool CircuitCall::operator==(const CircuitCall& o) const {
  if (name != o.name || operands != o.operands || params.size() != o.params.size()) return false;
  for (size_t i = 0; i < params.size(); ++i) {
    if (format_expr(*params[i]) != format_expr(*o.params[i])) return false;
  }
  return true;
}

int GateDefinition::arity() const { return std::countr_zero(static_cast<unsigned>(dimension)); }

const Declaration* Program::find_declaration(const std::string& name) const {
  for (const auto& d : declarations) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<int> instruction_qubits(const Instruction& instr) {
  if (const auto* g = std::get_if<GateApplication>(&instr)) return g->qubits;
  if (const auto* m = std::get_if<Measure>(&instr)) return {m->qubit};
  if (const auto* m = std::get_if<MeasureDiscard>(&instr)) return {m->qubit};
  return {};
}

bool is_gate(const Instruction& instr) { return std::holds_alternative<GateApplication>(instr); }

bool is_control_flow(const Instruction& instr) {
  return std::holds_alternative<Label>(instr) || std::holds_alternative<Jump>(instr) ||
         std::holds_alternative<JumpWhen>(instr) || std::holds_alternative<JumpUnless>(instr);
}

namespace {

bool same_definition(const GateDefinition& a, const GateDefinition& b) {
  if (a.name != b.name || a.params != b.params || a.dimension != b.dimension ||
      a.entries.size() != b.entries.size()) {
    return false;
  }
  for (size_t i = 0; i < a.entries.size(); ++i) {
    if (format_expr(*a.entries[i]) != format_expr(*b.entries[i])) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Program& a, const Program& b) {
  if (a.declarations != b.declarations || a.body != b.body) return false;
  if (a.gate_definitions.size() != b.gate_definitions.size()) return false;
  for (const auto& [name, def] : a.gate_definitions) {
    auto it = b.gate_definitions.find(name);
    if (it == b.gate_definitions.end() || !same_definition(def, it->second)) return false;
  }
  if (a.circuit_definitions.size() != b.circuit_definitions.size()) return false;
  for (const auto& [name, def] : a.circuit_definitions) {
    auto it = b.circuit_definitions.find(name);
    if (it == b.circuit_definitions.end()) return false;
    const auto& o = it->second;
    if (def.params != o.params || def.formals != o.formals || def.body != o.body) return false;
  }
  return true;
}

}  // namespace qcc
