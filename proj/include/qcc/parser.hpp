#pragma once

#include <string>
#include <string_view>

#include "qcc/program.hpp"

namespace qcc {

Program parse_program(std::string_view text);

// Replaces DEFCIRCUIT call sites by their bodies. Labels inside a body are
// renamed to `<label>_<k>` with k counting expansions program-wide.
Program expand_circuits(const Program& p);

std::string print_program(const Program& p);
std::string format_instruction(const Instruction& instr);

bool is_builtin_gate(const std::string& name);
// Number of parameters and qubits of a builtin gate; {-1,-1} if unknown.
std::pair<int, int> builtin_signature(const std::string& name);

}  // namespace qcc
