#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcc/addresser.hpp"
#include "qcc/cfg.hpp"
#include "qcc/chip.hpp"
#include "qcc/compressor.hpp"
#include "qcc/program.hpp"
#include "qcc/statesim.hpp"

namespace qcc {

struct CompileConfig {
  AddressConfig address;
  CompressOptions compress;
  bool state_prep = false;     // state-aware reductions on the entry block
  int entanglement_limit = 3;  // for the partial state simulation
  Trace* trace = nullptr;
};

// Duration + greedy search unless the chip carries fidelities.
CompileConfig default_compile_config(const ChipSpecification& chip);

struct CompileReport {
  std::map<std::string, int> gate_counts;
  int gates = 0;
  int two_qubit = 0;
  int depth = 0;
  double duration_ns = 0.0;
  int swaps = 0;
  int blocks = 0;
  int elided = 0;   // gates removed by the state-aware pass
  int prepared = 0; // groups replaced by state preparation
  std::map<std::string, double> stage_ms;
  Rewiring initial;
  Rewiring final;
};

struct CompileResult {
  Program program;
  CompileReport report;
  // Straight-line programs only: enough to check the result.
  bool straight_line = false;
  std::vector<Instruction> input;  // expanded source body
  std::map<int, int> permutation;
};

CompileResult compile_program(const Program& source, const ChipSpecification& chip, const CompileConfig& config);
CompileResult compile_text(std::string_view text, const ChipSpecification& chip, const CompileConfig& config);

// Gate counts, depth and duration of a compiled instruction list.
void measure_program(const std::vector<Instruction>& code, const ChipSpecification& chip, CompileReport& report);

std::string report_json(const CompileReport& r);
std::string report_text(const CompileReport& r);

}  // namespace qcc
