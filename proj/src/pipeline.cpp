#include "qcc/pipeline.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qcc/errors.hpp"
#include "qcc/parser.hpp"

namespace qcc {

namespace {

class StageClock {
 public:
  explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_[stage] += std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }

 private:
  std::map<std::string, double>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::set<int> logical_qubits(const std::vector<Instruction>& body) {
  std::set<int> out;
  for (const auto& i : body) {
    for (int q : instruction_qubits(i)) out.insert(q);
  }
  return out;
}

// Places every logical qubit not yet placed onto the lowest free slot,
// recording where that slot's contents sat at block entry.
void place_remaining(AddressResult& r, const std::set<int>& logicals, const ChipSpecification& chip) {
  std::map<int, int> from;  // exit slot -> entry slot
  for (auto [a, b] : r.permutation) from[b] = a;
  for (int l : logicals) {
    if (r.exit.physical(l)) continue;
    std::optional<int> slot;
    for (int p : chip.qubit_ids()) {
      if (!r.exit.logical(p)) {
        slot = p;
        break;
      }
    }
    if (!slot) throw AddressingError("no free physical qubit for logical qubit " + std::to_string(l));
    r.exit.assign(l, *slot);
    r.entry.assign(l, from.count(*slot) ? from.at(*slot) : *slot);
  }
}

std::vector<Instruction> compress_block(const std::vector<Instruction>& code, const ChipSpecification& chip,
                                        const CompileConfig& config, const NativizeOptions& nativize) {
  CompressOptions o = config.compress;
  o.nativize = nativize;
  return compress(code, chip, o);
}

}  // namespace

CompileConfig default_compile_config(const ChipSpecification& chip) {
  CompileConfig c;
  c.address = default_address_config(chip);
  return c;
}

CompileResult compile_program(const Program& source, const ChipSpecification& chip, const CompileConfig& config) {
  CompileResult result;
  CompileReport& report = result.report;
  StageClock clock(report.stage_ms);

  const Program p = expand_circuits(source);
  clock.lap("expand");
  const ControlFlowGraph cfg = build_cfg(p);
  clock.lap("cfg");

  NativizeOptions nativize = config.address.nativize;
  nativize.defs = &p.gate_definitions;
  nativize.trace = config.trace;
  nativize.cost = config.address.cost;

  std::vector<int> order = cfg.reverse_post_order();
  for (int b = 0; b < static_cast<int>(cfg.blocks.size()); ++b) {
    if (std::find(order.begin(), order.end(), b) == order.end()) order.push_back(b);
  }
  const std::set<int> logicals = logical_qubits(p.body);
  const bool several = cfg.blocks.size() > 1;

  std::vector<CompiledBlock> compiled(cfg.blocks.size());
  std::vector<bool> done(cfg.blocks.size(), false);
  for (int b : order) {
    AddressConfig ac = config.address;
    ac.nativize = nativize;
    if (b != cfg.entry) {
      std::optional<int> pred;
      for (int q : order) {
        if (!done[static_cast<size_t>(q)]) continue;
        const auto preds = cfg.predecessors(b);
        if (std::find(preds.begin(), preds.end(), q) != preds.end()) {
          pred = q;
          break;
        }
      }
      ac.initial = compiled[static_cast<size_t>(pred ? *pred : cfg.entry)].exit;
      ac.naive_rewiring = false;
    }
    if (config.trace && several) config.trace->note("address", "block " + std::to_string(b));
    AddressResult r = address_block(cfg.blocks[static_cast<size_t>(b)].body, chip, ac);
    if (several) place_remaining(r, logicals, chip);
    report.swaps += r.swaps;
    clock.lap("address");

    std::vector<Instruction> code = compress_block(r.code, chip, config, nativize);
    clock.lap("compress");

    if (config.state_prep && b == cfg.entry) {
      // Only the leading run of gates starts from a known |0...0>.
      size_t k = 0;
      while (k < code.size() && std::holds_alternative<GateApplication>(code[k])) ++k;
      GateSeq lead;
      for (size_t i = 0; i < k; ++i) lead.push_back(std::get<GateApplication>(code[i]));
      StatePassStats stats;
      const GateSeq reduced = state_aware_pass(lead, chip, nativize, config.entanglement_limit, true, &stats);
      report.elided += stats.elided;
      report.prepared += stats.prepared;
      std::vector<Instruction> next(reduced.begin(), reduced.end());
      next.insert(next.end(), code.begin() + static_cast<long>(k), code.end());
      code = compress_block(next, chip, config, nativize);
      clock.lap("state");
    }
    compiled[static_cast<size_t>(b)] = {std::move(code), r.entry, r.exit, r.permutation};
    done[static_cast<size_t>(b)] = true;
  }

  auto fixup = [&](const std::vector<std::pair<int, int>>& swaps) {
    std::vector<Instruction> out;
    for (auto [a, b] : swaps) {
      for (auto& g : nativize_gate({"SWAP", {}, {a, b}}, chip, nativize)) out.emplace_back(std::move(g));
    }
    report.swaps += static_cast<int>(swaps.size());
    return out;
  };
  result.program.declarations = p.declarations;
  result.program.body = reassemble(cfg, compiled, chip, fixup);
  clock.lap("reassemble");

  report.blocks = static_cast<int>(cfg.blocks.size());
  report.initial = compiled[static_cast<size_t>(cfg.entry)].entry;
  report.final = compiled.back().exit;
  measure_program(result.program.body, chip, report);

  result.straight_line = !several && cfg.blocks[0].header.empty();
  result.input = p.body;
  result.permutation = compiled[0].permutation;
  return result;
}

CompileResult compile_text(std::string_view text, const ChipSpecification& chip, const CompileConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Program p = parse_program(text);
  const double parse_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CompileResult r = compile_program(p, chip, config);
  r.report.stage_ms["parse"] = parse_ms;
  return r;
}

void measure_program(const std::vector<Instruction>& code, const ChipSpecification& chip, CompileReport& report) {
  report.gate_counts.clear();
  report.gates = report.two_qubit = report.depth = 0;
  report.duration_ns = 0.0;
  std::map<std::string, int> level;
  std::map<std::string, double> finish;
  for (const auto& i : code) {
    std::vector<std::string> res;
    for (int q : instruction_qubits(i)) res.push_back("q" + std::to_string(q));
    if (const auto* m = std::get_if<Measure>(&i)) res.push_back(m->target.name + "[" + std::to_string(m->target.index) + "]");
    if (res.empty()) continue;
    double cost = 0.0;
    if (const auto* g = std::get_if<GateApplication>(&i)) {
      ++report.gate_counts[g->name];
      ++report.gates;
      report.two_qubit += g->qubits.size() == 2;
      cost = gate_cost(chip, *g, CostMode::Duration);
    } else {
      ++report.gate_counts["MEASURE"];
    }
    int l = 0;
    double f = 0.0;
    for (const auto& r : res) {
      l = std::max(l, level[r]);
      f = std::max(f, finish[r]);
    }
    for (const auto& r : res) {
      level[r] = l + 1;
      finish[r] = f + cost;
    }
    report.depth = std::max(report.depth, l + 1);
    report.duration_ns = std::max(report.duration_ns, f + cost);
  }
}

namespace {

std::map<std::string, int> keyed(const Rewiring& w) {
  std::map<std::string, int> out;
  for (auto [l, p] : w.l2p()) out[std::to_string(l)] = p;
  return out;
}

}  // namespace

std::string report_json(const CompileReport& r) {
  nlohmann::ordered_json j;
  j["gates"] = r.gates;
  j["two_qubit_gates"] = r.two_qubit;
  j["gate_counts"] = r.gate_counts;
  j["depth"] = r.depth;
  j["duration_ns"] = r.duration_ns;
  j["swaps"] = r.swaps;
  j["blocks"] = r.blocks;
  j["state_elided"] = r.elided;
  j["state_prepared"] = r.prepared;
  j["initial_rewiring"] = keyed(r.initial);
  j["final_rewiring"] = keyed(r.final);
  j["stage_ms"] = r.stage_ms;
  return j.dump(2);
}

std::string report_text(const CompileReport& r) {
  std::ostringstream s;
  s << "gates: " << r.gates << " (2Q: " << r.two_qubit << ")\n";
  for (const auto& [name, n] : r.gate_counts) s << "  " << name << ": " << n << "\n";
  s << "depth: " << r.depth << "\n";
  s << "duration: " << r.duration_ns << " ns\n";
  s << "swaps: " << r.swaps << "\n";
  s << "blocks: " << r.blocks << "\n";
  if (r.elided || r.prepared) s << "state pass: " << r.elided << " elided, " << r.prepared << " prepared\n";
  s << "initial rewiring: " << format_rewiring(r.initial) << "\n";
  s << "final rewiring: " << format_rewiring(r.final) << "\n";
  for (const auto& [stage, ms] : r.stage_ms) s << "time " << stage << ": " << ms << " ms\n";
  return s.str();
}

}  // namespace qcc
