#include "qcc/trace.hpp"

#include "qcc/parser.hpp"

namespace qcc {

std::string format_gate_list(const GateSeq& seq) {
  if (seq.empty()) return "(nothing)";
  std::string out;
  for (const auto& g : seq) {
    if (!out.empty()) out += "; ";
    out += format_instruction(g);
  }
  return out;
}

void Trace::note(const std::string& stage, const std::string& text) {
  if (enabled_) lines_.push_back("[" + stage + "] " + text);
}

void Trace::rule(const std::string& stage, const std::string& rule, const GateSeq& consumed, const GateSeq& emitted) {
  if (!enabled_) return;
  lines_.push_back("[" + stage + "] " + rule + ": " + format_gate_list(consumed) + " => " + format_gate_list(emitted));
}

}  // namespace qcc
