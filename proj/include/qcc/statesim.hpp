#pragma once

#include <optional>
#include <set>
#include <vector>

#include "qcc/chip.hpp"
#include "qcc/nativize.hpp"
#include "qcc/program.hpp"
#include "qcc/rules.hpp"

namespace qcc {

// Tracked product of small pure states; qubits outside every component and
// not in `unknown` are still |0>.
struct PartialState {
  std::vector<StateAnnotation> components;
  std::set<int> unknown;

  // Component holding q, or nullptr (untouched qubits have no component).
  const StateAnnotation* component_of(int q) const;
  bool tracked(int q) const { return unknown.count(q) == 0; }
  // State on exactly `qubits` if they are all tracked, merging components
  // (untouched qubits enter as |0>). nullopt if any is unknown or the merged
  // register would exceed `limit` qubits.
  std::optional<StateAnnotation> restrict_to(const std::vector<int>& qubits, int limit) const;
};

class PartialSimulator {
 public:
  explicit PartialSimulator(int limit, const GateDefinitions* defs = nullptr) : limit_(limit), defs_(defs) {}

  const PartialState& state() const { return state_; }
  // Advances past one instruction.
  void apply(const Instruction& instr);
  void forget(int q);

 private:
  int limit_;
  const GateDefinitions* defs_;
  PartialState state_;
};

// State before each instruction of `seq`, starting from |0...0>.
std::vector<PartialState> partial_simulate(const std::vector<Instruction>& seq, int limit,
                                           const GateDefinitions* defs = nullptr);

// True when g leaves the tracked state unchanged up to phase.
bool acts_as_eigenvector(const GateApplication& g, const PartialState& state, int limit,
                         const GateDefinitions* defs = nullptr);

// Native sequence S with S|0...0> equal to target up to phase (1 or 2 qubits).
GateSeq state_prep_resynthesize(const Vector& target, const std::vector<int>& qubits,
                                const ChipSpecification& chip, const NativizeOptions& options);

struct StatePassStats {
  int elided = 0;
  int prepared = 0;
};

// State-aware rewriting of a block entered in |0...0>: eigenvector elision
// everywhere tracking allows, plus leading-segment state preparation when
// `state_prep` is set.
GateSeq state_aware_pass(const GateSeq& seq, const ChipSpecification& chip, const NativizeOptions& options,
                         int limit, bool state_prep, StatePassStats* stats = nullptr);

}  // namespace qcc
