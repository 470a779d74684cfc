#include "qcc/cfg.hpp"
#include "qcc/errors.hpp"
#include "qcc/parser.hpp"
#include "qcc/pipeline.hpp"
#include "qcc/verify.hpp"
#include "support.hpp"

using namespace qcc;
using namespace qcc::testing;

namespace {

ControlFlowGraph cfg_of(const std::string& text) { return build_cfg(parse_program(text)); }

ChipSpecification random_connected(std::mt19937_64& rng, int n) {
  std::vector<std::pair<int, int>> links;
  for (int b = 1; b < n; ++b) links.emplace_back(static_cast<int>(rng() % static_cast<unsigned>(b)), b);
  for (int k = 0; k < n / 2; ++k) {
    const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
    const int b = static_cast<int>(rng() % static_cast<unsigned>(n));
    if (a == b) continue;
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (std::find(links.begin(), links.end(), key) == links.end() &&
        std::find(links.begin(), links.end(), std::make_pair(key.second, key.first)) == links.end()) {
      links.push_back(key);
    }
  }
  return load_chip(chip_json(n, links, kRxRzGates, kCzGate));
}

// Instructions from LABEL @name up to (not including) the next jump.
std::vector<Instruction> section(const std::vector<Instruction>& body, const std::string& name) {
  std::vector<Instruction> out;
  bool on = false;
  for (const auto& i : body) {
    if (const auto* l = std::get_if<Label>(&i)) {
      if (l->name == name) {
        on = true;
        continue;
      }
    }
    if (!on) continue;
    if (is_control_flow(i)) break;
    out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("straight-line program is one block") {
  const auto g = cfg_of("H 0\nCNOT 0 1\n");
  REQUIRE(g.blocks.size() == 1);
  CHECK(g.blocks[0].body.size() == 2);
  CHECK(g.blocks[0].term.kind == TerminatorKind::Halt);
  CHECK(cfg_of("").blocks.size() == 1);
}

TEST_CASE("reset idiom gives three blocks with a conditional edge") {
  const auto g = cfg_of("DECLARE scratch BIT\nMEASURE 0 scratch\nJUMP-UNLESS @done scratch\nX 0\nLABEL @done\n");
  REQUIRE(g.blocks.size() == 3);
  CHECK(g.blocks[0].term.kind == TerminatorKind::JumpUnless);
  CHECK(g.blocks[0].term.target == 2);
  CHECK(g.blocks[0].term.next == 1);
  CHECK(g.blocks[1].term.kind == TerminatorKind::Fallthrough);
  CHECK(g.blocks[2].label == "done");
  CHECK(g.predecessors(2) == std::vector<int>{0, 1});
  CHECK(g.reverse_post_order() == std::vector<int>{0, 1, 2});
}

TEST_CASE("jumped-over region is unreachable") {
  const auto g = cfg_of("H 0\nJUMP @b\nLABEL @a\nX 0\nLABEL @b\nY 0\n");
  REQUIRE(g.blocks.size() == 3);
  CHECK(g.blocks[1].label == "a");
  CHECK(g.successors(0) == std::vector<int>{2});
  CHECK(g.reverse_post_order() == std::vector<int>{0, 2});
}

TEST_CASE("bad labels are rejected") {
  CHECK_THROWS_AS(cfg_of("JUMP @nowhere\n"), Error);
  CHECK_THROWS_AS(cfg_of("LABEL @a\nLABEL @a\n"), Error);
}

TEST_CASE("pragmas separate blocks") {
  const auto g = cfg_of("H 0\nPRAGMA PRESERVE_BLOCK\nH 1\n");
  REQUIRE(g.blocks.size() == 2);
  CHECK(g.blocks[1].header.size() == 1);
  CHECK(g.blocks[0].term.kind == TerminatorKind::Fallthrough);
}

TEST_CASE("rewiring swaps realize the target placement") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const ChipSpecification chip = random_connected(rng, n);
    std::vector<int> slots = chip.qubit_ids();
    std::shuffle(slots.begin(), slots.end(), rng);
    std::vector<int> target = slots;
    std::shuffle(target.begin(), target.end(), rng);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    Rewiring from, to;
    for (int l = 0; l < k; ++l) {
      from.assign(l, slots[static_cast<size_t>(l)]);
      to.assign(l, target[static_cast<size_t>(l)]);
    }
    Rewiring w = from;
    for (auto [a, b] : rewiring_swaps(chip, from, to)) {
      CHECK(chip.adjacent(a, b));
      w.swap_physical(a, b);
    }
    CHECK(w == to);
  }
  const ChipSpecification two = cz_line(2);
  Rewiring a, b;
  a.assign(0, 0);
  a.assign(1, 1);
  b.assign(0, 1);
  b.assign(1, 0);
  CHECK(rewiring_swaps(two, a, b).size() == 1);
  CHECK(rewiring_swaps(two, a, a).empty());
}

TEST_CASE("single block reassembles verbatim") {
  const auto g = cfg_of("H 0\n");
  CompiledBlock c;
  c.code = {gate("RZ", {1.0}, {3})};
  c.entry.assign(0, 3);
  c.exit = c.entry;
  const auto out = reassemble(g, {c}, cz_line(4), [](const auto&) { return std::vector<Instruction>{}; });
  CHECK(out == c.code);
}

TEST_CASE("differing rewirings between sequential blocks cost one swap") {
  const auto g = cfg_of("H 0\nLABEL @next\nH 1\n");
  REQUIRE(g.blocks.size() == 2);
  CompiledBlock first, second;
  first.exit.assign(0, 0);
  first.exit.assign(1, 1);
  second.entry.assign(0, 1);
  second.entry.assign(1, 0);
  int calls = 0;
  const auto out = reassemble(g, {first, second}, cz_line(2), [&](const std::vector<std::pair<int, int>>& s) {
    calls += static_cast<int>(s.size());
    return std::vector<Instruction>(s.size(), Instruction{gate("SWAP", {}, {0, 1})});
  });
  CHECK(calls == 1);
  CHECK(out.size() == 2);
}

TEST_CASE("loop bodies return to their entry wiring") {
  const ChipSpecification chip = cz_line(3);
  const std::string text = "DECLARE ro BIT\nLABEL @loop\nCNOT 0 2\nH 1\nCNOT 1 0\nJUMP-WHEN @loop ro\n";
  const CompileResult r = compile_text(text, chip, default_compile_config(chip));
  const auto& body = r.program.body;
  // Loop body plus the trampoline that fixes the wiring before jumping back.
  std::vector<Instruction> path = section(body, "loop");
  for (const auto& i : body) {
    if (const auto* j = std::get_if<JumpWhen>(&i)) {
      if (j->label != "loop") {
        const auto t = section(body, j->label);
        path.insert(path.end(), t.begin(), t.end());
      }
    }
  }
  std::vector<Instruction> source;
  for (const auto& i : parse_program(text).body) {
    if (std::holds_alternative<GateApplication>(i)) source.push_back(i);
  }
  std::map<int, int> identity;
  for (int q : chip.qubit_ids()) identity[q] = q;
  CHECK(verify_compiled(source, path, r.report.initial, identity).equivalent);
}

TEST_CASE("straight-line compilation passes through the CFG unchanged in meaning") {
  const ChipSpecification chip = cz_line(4);
  const std::string text = "H 0\nCNOT 0 3\nCPHASE(0.3) 1 2\nSWAP 0 2\n";
  const CompileResult r = compile_text(text, chip, default_compile_config(chip));
  REQUIRE(r.straight_line);
  CHECK(verify_compiled(r.input, r.program.body, r.report.initial, r.permutation).equivalent);
}
