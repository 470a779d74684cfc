#pragma once

#include <string>
#include <vector>

#include "qcc/program.hpp"

namespace qcc {

using GateSeq = std::vector<GateApplication>;

// Collects the stage-by-stage rule log printed by --verbose.
class Trace {
 public:
  explicit Trace(bool enabled = false) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  void note(const std::string& stage, const std::string& text);
  void rule(const std::string& stage, const std::string& rule, const GateSeq& consumed, const GateSeq& emitted);
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  bool enabled_ = false;
  std::vector<std::string> lines_;
};

std::string format_gate_list(const GateSeq& seq);

}  // namespace qcc
