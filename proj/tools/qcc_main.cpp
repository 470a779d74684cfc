#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "qcc/errors.hpp"
#include "qcc/parser.hpp"
#include "qcc/pipeline.hpp"
#include "qcc/rules.hpp"
#include "qcc/verify.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kCompile = 2, kVerify = 3 };

std::string slurp(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return slurp(f);
}

std::set<std::string> symbols(const std::vector<qcc::Instruction>& body) {
  std::set<std::string> out;
  for (const auto& i : body) {
    if (const auto* g = std::get_if<qcc::GateApplication>(&i)) {
      for (const auto& p : g->params) {
        for (const auto& [name, c] : p.terms()) out.insert(name);
      }
    }
  }
  return out;
}

std::string stage_of(const std::exception& e) {
  if (dynamic_cast<const qcc::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const qcc::ChipError*>(&e)) return "isa";
  if (dynamic_cast<const qcc::SynthesisError*>(&e)) return "synthesis";
  if (dynamic_cast<const qcc::AddressingError*>(&e)) return "addressing";
  return "compile";
}

void list_rules() {
  for (const auto& r : qcc::rule_catalog()) {
    std::cout << r.name;
    if (r.state_aware) std::cout << " [state-aware]";
    std::cout << "\n    " << r.summary << "\n";
  }
}

// Returns an exit code; prints its own diagnostics.
int check(const qcc::CompileResult& r, bool state_only, uint64_t seed) {
  if (!r.straight_line) {
    std::cerr << "verify: skipped, program has control flow\n";
    return kOk;
  }
  qcc::VerifyOptions o;
  o.state_only = state_only;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
  for (const auto& s : symbols(r.input)) o.bindings[s] = angle(rng);
  std::vector<qcc::Instruction> gates, compiled;
  for (const auto& i : r.input) {
    if (std::holds_alternative<qcc::GateApplication>(i)) gates.push_back(i);
  }
  for (const auto& i : r.program.body) {
    if (std::holds_alternative<qcc::GateApplication>(i)) compiled.push_back(i);
  }
  if (gates.size() != r.input.size() || compiled.size() != r.program.body.size()) {
    std::cerr << "verify: skipped, program is not purely unitary\n";
    return kOk;
  }
  try {
    const auto v = qcc::verify_compiled(gates, compiled, r.report.initial, r.permutation, o);
    std::cerr << "verify: " << (v.equivalent ? "ok" : "FAILED") << " (deviation " << v.deviation << ", "
              << v.qubits << " qubits)\n";
    return v.equivalent ? kOk : kVerify;
  } catch (const qcc::Error& e) {
    std::cerr << "verify: skipped, " << e.what() << "\n";
    return kOk;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcc: compile Quil programs for a chip's native gates and connectivity"};
  std::string input_path, output_path, isa_path, cost = "auto", search = "auto", stats;
  double discount = 0.5;
  int limit = 3;
  uint64_t seed = 0;
  bool state_prep = false, verbose = false, verify = false, rules = false, naive = false, no_template = false;

  app.add_option("input", input_path, "Quil program (default: stdin)");
  app.add_option("-o,--output", output_path, "write the compiled program here (default: stdout)");
  app.add_option("--isa", isa_path, "chip description (JSON)");
  app.add_option("--cost", cost, "swap cost model")->check(CLI::IsMember({"auto", "duration", "fidelity"}));
  app.add_option("--search", search, "swap search")->check(CLI::IsMember({"auto", "greedy", "a-star"}));
  app.add_option("--discount", discount, "lookahead discount factor")->check(CLI::Range(0.0, 1.0));
  app.add_option("--compression-limit", limit, "largest compression subgraph, in qubits")->check(CLI::Range(1, 4));
  app.add_flag("--enable-state-prep-reductions", state_prep, "use the known initial state to shorten the program");
  app.add_flag("--verbose", verbose, "print the stage-by-stage rule trace to stderr");
  app.add_flag("--verify", verify, "check the output against the input by simulation");
  app.add_option("--seed", seed, "nonzero: randomized addressing restarts");
  app.add_option("--stats", stats, "print a compilation report to stderr")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--list-rules", rules, "list the rewrite rules and exit");
  app.add_flag("--naive-rewiring", naive, "place logical qubit i on physical qubit i");
  app.add_flag("--no-ccnot-template", no_template, "synthesize CCNOT generically");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (rules) {
    list_rules();
    return kOk;
  }
  if (discount <= 0.0 || discount >= 1.0) {
    std::cerr << "--discount must lie strictly between 0 and 1\n";
    return kUsage;
  }
  if (isa_path.empty()) {
    std::cerr << "--isa is required\n";
    return kUsage;
  }

  std::string text, isa;
  try {
    isa = read_file(isa_path);
    text = input_path.empty() ? slurp(std::cin) : read_file(input_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }

  qcc::Trace trace(verbose);
  qcc::CompileResult result;
  try {
    const qcc::ChipSpecification chip = qcc::load_chip(isa);
    qcc::CompileConfig config = qcc::default_compile_config(chip);
    if (cost != "auto") config.address.cost = cost == "fidelity" ? qcc::CostMode::Fidelity : qcc::CostMode::Duration;
    if (search != "auto") config.address.search = search == "a-star" ? qcc::SearchMode::AStar : qcc::SearchMode::Greedy;
    config.address.discount = discount;
    config.address.seed = seed;
    config.address.naive_rewiring = naive;
    config.address.nativize.ccnot_template = !no_template;
    config.compress.limit = limit;
    config.state_prep = state_prep;
    if (verbose) config.trace = &trace;
    result = qcc::compile_text(text, chip, config);
  } catch (const std::exception& e) {
    for (const auto& l : trace.lines()) std::cerr << l << "\n";
    std::cerr << stage_of(e) << " error: " << e.what() << "\n";
    return kCompile;
  }

  for (const auto& l : trace.lines()) std::cerr << l << "\n";
  const std::string out = qcc::print_program(result.program);
  if (output_path.empty()) {
    std::cout << out;
  } else {
    std::ofstream f(output_path);
    if (!(f << out)) {
      std::cerr << "cannot write " << output_path << "\n";
      return kUsage;
    }
  }
  if (stats == "json") std::cerr << qcc::report_json(result.report) << "\n";
  if (stats == "text") std::cerr << qcc::report_text(result.report);
  return verify ? check(result, state_prep, seed) : kOk;
}
