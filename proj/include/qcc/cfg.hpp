#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qcc/addresser.hpp"
#include "qcc/program.hpp"

namespace qcc {

enum class TerminatorKind { Fallthrough, Jump, JumpWhen, JumpUnless, Halt };

struct Terminator {
  TerminatorKind kind = TerminatorKind::Halt;
  Instruction instr;  // the jump itself, when there is one
  int target = -1;    // jump destination block
  int next = -1;      // fall-through block
};

struct BasicBlock {
  std::string label;                // empty unless the block starts at a LABEL
  std::vector<Instruction> header;  // pragmas kept verbatim at the top
  std::vector<Instruction> body;    // gates and measurements only
  Terminator term;
};

struct ControlFlowGraph {
  std::vector<BasicBlock> blocks;  // in source order
  int entry = 0;

  std::vector<int> successors(int b) const;
  std::vector<int> predecessors(int b) const;
  // Blocks reachable from the entry, in reverse post-order.
  std::vector<int> reverse_post_order() const;
};

ControlFlowGraph build_cfg(const Program& p);

struct CompiledBlock {
  std::vector<Instruction> code;
  Rewiring entry;
  Rewiring exit;
  std::map<int, int> permutation;
};

// SWAPs (as physical gate pairs) that carry every logical qubit from `from`
// to its place in `to`. Both must place the same logical qubits.
std::vector<std::pair<int, int>> rewiring_swaps(const ChipSpecification& chip, const Rewiring& from, const Rewiring& to);

// Linearizes compiled blocks, inserting SWAP sequences on edges whose
// source exit rewiring differs from the destination entry rewiring.
// `fixup` turns a SWAP list into native code.
std::vector<Instruction> reassemble(const ControlFlowGraph& cfg, const std::vector<CompiledBlock>& compiled,
                                    const ChipSpecification& chip,
                                    const std::function<std::vector<Instruction>(const std::vector<std::pair<int, int>>&)>& fixup);

}  // namespace qcc
