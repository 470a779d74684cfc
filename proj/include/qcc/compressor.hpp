#pragma once

#include <vector>

#include "qcc/chip.hpp"
#include "qcc/nativize.hpp"
#include "qcc/program.hpp"

namespace qcc {

struct CompressOptions {
  int limit = 3;          // largest subgraph tag, in qubits
  int rewalk_depth = 3;   // nested re-walks per blocked subgraph
  bool rollups = true;    // matrix resynthesis of 1Q runs and 2Q blocks
  NativizeOptions nativize;
};

// Fixpoint peephole rewriting with the chip's optimizer rules.
GateSeq peephole(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options);

// Replaces 1Q runs and 2Q blocks by resynthesized composites when strictly
// cheaper. Blocks with symbolic parameters are left alone.
GateSeq rollup_resynthesize(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options);

// Peephole plus rollups, repeated until nothing improves.
GateSeq optimize_sequence(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options);

// The resource-tagged subgraph walk, iterated until the output is stable.
std::vector<Instruction> compress(const std::vector<Instruction>& seq, const ChipSpecification& chip,
                                  const CompressOptions& options);
GateSeq compress(const GateSeq& seq, const ChipSpecification& chip, const CompressOptions& options);

}  // namespace qcc
