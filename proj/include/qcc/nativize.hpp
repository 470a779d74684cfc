#pragma once

#include <optional>

#include "qcc/chip.hpp"
#include "qcc/linalg.hpp"
#include "qcc/synthesis.hpp"
#include "qcc/trace.hpp"

namespace qcc {

struct NativizeOptions {
  bool ccnot_template = true;
  // Emit RZ/RY/RZ verbatim (zero angles included) when RY and RZ are both
  // native, as the Euler compiler does; otherwise search for the shortest form.
  bool verbatim_zyz = true;
  CostMode cost = CostMode::Duration;
  const GateDefinitions* defs = nullptr;
  Trace* trace = nullptr;
};

// Cost order used to compare candidate sequences: 2Q count, then total count,
// then summed gate cost.
struct SeqCost {
  int two_qubit = 0;
  int total = 0;
  double weight = 0.0;

  bool operator<(const SeqCost& o) const;
};
SeqCost sequence_cost(const GateSeq& seq, const ChipSpecification& chip, CostMode mode);

// Shortest native realization of a 2x2 unitary on physical qubit q, or
// nullopt when the qubit's gate set cannot express it.
std::optional<GateSeq> synthesize_1q_native(const Matrix& u, int q, const ChipSpecification& chip,
                                            const NativizeOptions& options);

// Entanglers usable on link (a, b) and their costs.
EntanglerOptions link_entanglers(const ChipSpecification& chip, int a, int b, CostMode mode);

// Native realization of a 4x4 unitary on adjacent physical qubits a, b
// (a is the most significant bit of u).
GateSeq synthesize_2q_native(const Matrix& u, int a, int b, const ChipSpecification& chip,
                             const NativizeOptions& options);

// Translates one gate on physical, adjacent qubits into native gates.
GateSeq nativize_gate(const GateApplication& g, const ChipSpecification& chip, const NativizeOptions& options);

// Rewrites a gate on three or more logical qubits into gates on at most two.
GateSeq lower_multiqubit(const GateApplication& g, const NativizeOptions& options);

bool all_native(const GateSeq& seq, const ChipSpecification& chip);

}  // namespace qcc
