#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcc/addresser.hpp"
#include "qcc/linalg.hpp"
#include "qcc/program.hpp"

namespace qcc {

struct VerifyOptions {
  double tolerance = 1e-7;
  // Compare output states from |0...0> instead of full unitaries.
  bool state_only = false;
  int max_qubits = 8;
  std::map<std::string, double> bindings;  // values for symbolic parameters
  const GateDefinitions* defs = nullptr;
};

struct VerifyResult {
  bool equivalent = false;
  double deviation = 0.0;  // distance after removing the global phase
  int qubits = 0;
};

// Checks output == P * input * entry^-1 up to phase, where input acts on
// logical qubits placed by `entry` and P moves every physical slot
// according to `permutation`. Both programs must be straight-line gates.
VerifyResult verify_compiled(const std::vector<Instruction>& input, const std::vector<Instruction>& output,
                             const Rewiring& entry, const std::map<int, int>& permutation,
                             const VerifyOptions& options = {});

// Same, for gate lists on identical qubits with no rewiring.
VerifyResult verify_same(const std::vector<GateApplication>& a, const std::vector<GateApplication>& b,
                         const VerifyOptions& options = {});

}  // namespace qcc
