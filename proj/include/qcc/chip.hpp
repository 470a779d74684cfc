#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcc/program.hpp"

namespace qcc {

// One native operation on a simplex. Empty optionals are wildcards ("_").
struct NativeGateRecord {
  std::string op;
  std::vector<std::optional<double>> params;
  std::vector<std::optional<int>> args;  // positions within the simplex
  double duration_ns = 0.0;
  double fidelity = 1.0;

  bool operator==(const NativeGateRecord&) const = default;
};

struct QubitRecord {
  int id = 0;
  std::vector<NativeGateRecord> gates;
  bool operator==(const QubitRecord&) const = default;
};

struct LinkRecord {
  int a = 0;  // a < b
  int b = 0;
  std::vector<NativeGateRecord> gates;
  bool operator==(const LinkRecord&) const = default;
};

enum class NativeStatus { Native, NonNativeGate, NonAdjacent };
enum class CostMode { Duration, Fidelity };

class ChipSpecification {
 public:
  static constexpr double kDefault1QDuration = 50.0;
  static constexpr double kDefault2QDuration = 150.0;

  std::map<int, QubitRecord> qubits;
  std::map<std::pair<int, int>, LinkRecord> links;

  bool has_qubit(int q) const { return qubits.count(q) > 0; }
  bool adjacent(int a, int b) const;
  const LinkRecord* link(int a, int b) const;
  std::vector<int> neighbors(int q) const;
  std::vector<int> qubit_ids() const;

  // Records of the simplex spanned by `qubits` (1 or 2 distinct ids).
  const std::vector<NativeGateRecord>* records(const std::vector<int>& simplex) const;
  // First record matching g on its exact simplex, if any.
  const NativeGateRecord* find_native(const GateApplication& g) const;

  bool operator==(const ChipSpecification&) const = default;
};

ChipSpecification load_chip(std::string_view text);
std::string serialize_chip(const ChipSpecification& chip);

// Default gate sets used when a simplex omits "gates".
std::vector<NativeGateRecord> default_qubit_gates();
std::vector<NativeGateRecord> default_link_gates();

// Does the record admit the gate with the given argument positions?
bool record_matches(const NativeGateRecord& r, const GateApplication& g, const std::vector<int>& positions);

// `rewired` says whether the qubits are physical. Logical gates are checked
// for operator/parameter shape against any simplex of the right size.
NativeStatus is_native(const ChipSpecification& chip, const Instruction& instr, bool rewired = true);

// Cost of one native record under the chosen metric.
double record_cost(const NativeGateRecord& r, CostMode mode);
// Cost of a gate as executed on the chip; non-native gates get the cost of
// the cheapest record on the same simplex size.
double gate_cost(const ChipSpecification& chip, const GateApplication& g, CostMode mode);

class CostTable {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  CostTable() = default;
  CostTable(const ChipSpecification& chip, CostMode mode);

  double cost(int a, int b) const;
  // SWAP cost of one link; infinite for non-adjacent pairs.
  double edge(int a, int b) const;
  int hops(int a, int b) const;
  // Shortest path a..b; ties go to the lexicographically smallest sequence.
  std::vector<int> path(int a, int b) const;
  const std::vector<int>& ids() const { return ids_; }
  CostMode mode() const { return mode_; }
  // Cheapest native 2Q gate cost on any link.
  double min_2q_cost() const { return min_2q_; }

 private:
  int index(int q) const;

  CostMode mode_ = CostMode::Duration;
  std::vector<int> ids_;
  std::map<int, int> index_;
  std::vector<double> dist_;
  std::vector<double> edge_;
  std::vector<int> hops_;
  double min_2q_ = 0.0;
};

CostTable build_cost_table(const ChipSpecification& chip, CostMode mode);

}  // namespace qcc
