#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcc/chip.hpp"
#include "qcc/nativize.hpp"
#include "qcc/program.hpp"

namespace qcc {

struct DagEdge {
  int from = 0;
  int to = 0;
  std::string resource;  // "q3" or "ro[0]"
};

// Dependencies between instructions that share a qubit or classical address.
struct InstructionDag {
  std::vector<Instruction> nodes;
  std::vector<DagEdge> edges;
  std::vector<std::vector<int>> preds;
  std::vector<std::vector<int>> succs;
};

InstructionDag build_dag(const std::vector<Instruction>& block);

// Partial logical-to-physical qubit map.
class Rewiring {
 public:
  std::optional<int> physical(int logical) const;
  std::optional<int> logical(int physical) const;
  void assign(int logical, int physical);
  // Exchanges the contents of two physical qubits (either may be empty).
  void swap_physical(int a, int b);
  const std::map<int, int>& l2p() const { return l2p_; }
  const std::map<int, int>& p2l() const { return p2l_; }
  bool empty() const { return l2p_.empty(); }
  bool operator==(const Rewiring&) const = default;

 private:
  std::map<int, int> l2p_;
  std::map<int, int> p2l_;
};

std::string format_rewiring(const Rewiring& r);

enum class SearchMode { Greedy, AStar };

struct AddressConfig {
  CostMode cost = CostMode::Duration;
  SearchMode search = SearchMode::Greedy;
  double discount = 0.5;
  int lookahead = 20;           // pending 2Q gates weighed by the heuristic
  bool naive_rewiring = false;  // identity placement instead of lazy
  bool recombine_swaps = true;
  uint64_t seed = 0;            // nonzero: randomized restarts, best kept
  int restarts = 4;
  std::optional<Rewiring> initial;
  NativizeOptions nativize;
};

// Duration + greedy, or fidelity + A* when the chip carries fidelities.
AddressConfig default_address_config(const ChipSpecification& chip);

struct AddressResult {
  std::vector<Instruction> code;  // native, on physical qubits
  Rewiring entry;                 // where each logical qubit started
  Rewiring exit;                  // where it ended
  std::map<int, int> permutation; // physical slot at entry -> physical slot at exit
  int swaps = 0;
};

// The lookahead cost of `pending` (2Q gates on logical qubits) under `wiring`.
double heuristic_cost(const ChipSpecification& chip, const CostTable& table, const Rewiring& wiring,
                      const std::vector<GateApplication>& pending, double discount);

// Physical SWAPs that make the gate's qubits adjacent. `rest` is the
// lookahead used to break ties.
std::vector<std::pair<int, int>> select_swaps(const ChipSpecification& chip, const CostTable& table,
                                              const Rewiring& wiring, const GateApplication& gate,
                                              const std::vector<GateApplication>& rest, const AddressConfig& config);

// Free physical qubit for `logical` that minimizes the lookahead cost.
int assign_fresh(const ChipSpecification& chip, const CostTable& table, const Rewiring& wiring, int logical,
                 const std::vector<GateApplication>& pending, double discount);

AddressResult address_block(const std::vector<Instruction>& block, const ChipSpecification& chip,
                            const AddressConfig& config);

}  // namespace qcc
