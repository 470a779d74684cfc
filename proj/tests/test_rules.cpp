#include <functional>
#include <numbers>

#include "qcc/errors.hpp"
#include "qcc/nativize.hpp"
#include "qcc/parser.hpp"
#include "qcc/rules.hpp"
#include "rule_windows.hpp"
#include "support.hpp"

using namespace qcc;
using namespace qcc::testing;

namespace {

constexpr double kPi = std::numbers::pi;

GateSeq apply_rule(const std::string& rule, const GateSeq& window, const RuleContext& ctx = {}) {
  auto out = find_rule(rule).apply(window, ctx);
  REQUIRE(out.has_value());
  return *out;
}

bool inapplicable(const std::string& rule, const GateSeq& window, const RuleContext& ctx = {}) {
  return !find_rule(rule).apply(window, ctx).has_value();
}

std::string text(const GateSeq& seq) {
  std::string s;
  for (const auto& g : seq) s += format_instruction(g) + "\n";
  return s;
}

ChipSpecification chip_with(const std::string& qubit_gates, const std::string& link_gates, int n = 2) {
  return load_chip(chip_json(n, line_links(n), qubit_gates, link_gates));
}

const char* kRzRyGates = R"({"operator": "RZ", "parameters": ["_"]}, {"operator": "RY", "parameters": ["_"]})";

}  // namespace

TEST_CASE("agglutinate-RZs") {
  CHECK(apply_rule("agglutinate-RZs", {gate("RZ", {-kPi}, {0}), gate("RZ", {kPi}, {0})}) ==
        GateSeq{gate("RZ", {0.0}, {0})});
  const ParamExpr a = ParamExpr::variable("a");
  const GateSeq sym = apply_rule("agglutinate-RZs", {gate("RZ", {a}, {0}), gate("RZ", {0.5 * a}, {0})});
  REQUIRE(sym.size() == 1);
  CHECK(sym[0].params[0] == 1.5 * a);
  CHECK(inapplicable("agglutinate-RZs", {gate("RZ", {0.3}, {0}), gate("RZ", {0.4}, {1})}));
}

TEST_CASE("eliminate-full-CPHASE") {
  CHECK(apply_rule("eliminate-full-CPHASE", {gate("CPHASE", {2 * kPi}, {1, 0})}).empty());
  CHECK(apply_rule("eliminate-full-CPHASE", {gate("CPHASE", {0.0}, {0, 1})}).empty());
  CHECK(inapplicable("eliminate-full-CPHASE", {gate("CPHASE", {ParamExpr::variable("t")}, {0, 1})}));
  CHECK(inapplicable("eliminate-full-CPHASE", {gate("CPHASE", {kPi}, {0, 1})}));
}

TEST_CASE("eliminate-zero-rotation") {
  CHECK(apply_rule("eliminate-zero-rotation", {gate("RZ", {0.0}, {0})}).empty());
  CHECK(apply_rule("eliminate-zero-rotation", {gate("RX", {-4 * kPi}, {3})}).empty());
  CHECK(inapplicable("eliminate-zero-rotation", {gate("RZ", {1e-6}, {0})}));
  CHECK(inapplicable("eliminate-zero-rotation", {gate("RY", {ParamExpr::variable("t")}, {0})}));
}

TEST_CASE("commute-RZ-through-CZ") {
  const GateSeq in{gate("RZ", {0.7}, {0}), gate("CZ", {}, {0, 1})};
  const GateSeq out = apply_rule("commute-RZ-through-CZ", in);
  CHECK(out == GateSeq{gate("CZ", {}, {0, 1}), gate("RZ", {0.7}, {0})});
  CHECK(inapplicable("commute-RZ-through-CZ", {gate("RZ", {0.7}, {2}), gate("CZ", {}, {0, 1})}));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    const GateSeq w{gate("RZ", {angle(rng)}, {1}), gate("CZ", {}, {0, 1})};
    const std::vector<int> qs{0, 1};
    // Diagonal gates commute exactly, phase included.
    CHECK(reference_unitary(w, qs).isApprox(reference_unitary(apply_rule("commute-RZ-through-CZ", w), qs), 1e-14));
  }
}

TEST_CASE("CCNOT-to-CNOT emits the listing") {
  const GateSeq out = apply_rule("CCNOT-to-CNOT", {gate("CCNOT", {}, {0, 1, 2})});
  CHECK(text(out) ==
        "H 2\nCNOT 1 2\nRZ(-pi/4) 2\nCNOT 0 2\nRZ(pi/4) 2\nCNOT 1 2\nRZ(-pi/4) 2\nCNOT 0 2\nRZ(pi/4) 1\n"
        "RZ(pi/4) 2\nCNOT 0 1\nH 2\nRZ(pi/4) 0\nRZ(-pi/4) 1\nCNOT 0 1\n");
  CHECK(count_named(out, "CNOT") == 6);
  CHECK(same_unitary(out, {gate("CCNOT", {}, {0, 1, 2})}));
  CHECK(inapplicable("CCNOT-to-CNOT", {gate("CNOT", {}, {0, 1})}));
}

TEST_CASE("CPHASE template keeps the angle symbolic") {
  const ParamExpr t3 = ParamExpr::variable("t", 1.0 / 3.0);
  const GateSeq out = apply_rule("CPHASE-template", {gate("CPHASE", {t3}, {0, 1})});
  CHECK(text(out) ==
        "RZ(-pi/2) 1\nRX(pi/2) 1\nCZ 1 0\nRX(-pi/2) 1\nRZ(-t/6) 1\nRX(pi/2) 1\nCZ 1 0\nRZ(t/6) 0\nRX(-pi/2) 1\n"
        "RZ(pi/2 + t/6) 1\n");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(-10, 10);
  for (int i = 0; i < 10; ++i) {
    const std::map<std::string, double> v{{"t", angle(rng)}};
    CHECK(same_unitary(bind_params(out, v), {bind_params(gate("CPHASE", {t3}, {0, 1}), v)}));
  }
}

TEST_CASE("rule classification") {
  const ChipSpecification rxrz = load_chip(kPairChip);
  CHECK(classify_rule(find_rule("euler-zyz-compiler"), rxrz) == RuleClass::Nativizer);
  CHECK(classify_rule(find_rule("agglutinate-RZs"), rxrz) == RuleClass::Optimizer);
  CHECK(classify_rule(find_rule("eliminate-zero-rotation"), rxrz) == RuleClass::Optimizer);

  const ChipSpecification cz = cz_line(3);
  CHECK(classify_rule(find_rule("CCNOT-to-CNOT"), cz) == RuleClass::Nativizer);
  CHECK(classify_rule(find_rule("CNOT-to-CZ"), cz) == RuleClass::Nativizer);
  CHECK(classify_rule(find_rule("commute-RZ-through-CZ"), cz) == RuleClass::Optimizer);

  const ChipSpecification cphase = chip_with(kRzRyGates, R"({"operator": "CPHASE", "parameters": ["_"]})");
  CHECK(classify_rule(find_rule("eliminate-full-CPHASE"), cphase) == RuleClass::Optimizer);
  CHECK(classify_rule(find_rule("agglutinate-RZs"), cphase) == RuleClass::Optimizer);
  // No RX gates at all: RX fusion is not an optimizer here.
  CHECK(classify_rule(find_rule("agglutinate-RXs"), cphase) != RuleClass::Optimizer);

  for (const auto& r : rule_catalog()) {
    CHECK_FALSE(to_string(classify_rule(r, cz)).empty());
  }
}

TEST_CASE("catalog order and lookup") {
  const auto& c = rule_catalog();
  REQUIRE(c.size() == 17);
  CHECK(c.front().name == "agglutinate-RZs");
  CHECK(find_rule("kak-compiler").input_arity == 1);
  CHECK_THROWS_AS(find_rule("no-such-rule"), Error);
  std::set<std::string> names;
  for (const auto& r : c) CHECK(names.insert(r.name).second);
}

TEST_CASE("nativize CNOT on the CZ/RX/RZ chip") {
  const ChipSpecification chip = load_chip(chip_json(6, {{4, 5}, {0, 1}}, kRxRzGates, kCzGate));
  const GateApplication cnot = gate("CNOT", {}, {5, 4});
  const GateSeq out = nativize_gate(cnot, chip, {});
  CHECK(all_native(out, chip));
  CHECK(count_named(out, "CZ") == 1);
  CHECK(same_unitary(out, {cnot}));
}

TEST_CASE("nativize passes native gates through") {
  const ChipSpecification chip = load_chip(kPairChip);
  CHECK(nativize_gate(gate("RZ", {0.3}, {0}), chip, {}) == GateSeq{gate("RZ", {0.3}, {0})});
  CHECK(nativize_gate(gate("CZ", {}, {1, 0}), chip, {}) == GateSeq{gate("CZ", {}, {1, 0})});
}

TEST_CASE("nativize symbolic gates") {
  const ChipSpecification chip = cz_line(2);
  const ParamExpr t = ParamExpr::variable("t");
  for (const auto& g : {gate("CPHASE", {t}, {0, 1}), gate("RX", {t}, {1}), gate("RY", {0.5 * t}, {0})}) {
    const GateSeq out = nativize_gate(g, chip, {});
    CHECK(all_native(out, chip));
    for (double v : {-2.0, 0.3, 4.1}) CHECK(same_unitary(bind_params(out, {{"t", v}}), {bind_params(g, {{"t", v}})}));
  }
  CHECK_THROWS_AS(nativize_gate(gate("CZ", {}, {0, 2}), cz_line(3), {}), AddressingError);
}

TEST_CASE("one-qubit synthesis on restricted gate sets") {
  std::mt19937_64 rng(21);
  const ChipSpecification pair = load_chip(kPairChip);
  const ChipSpecification rxrz = cz_line(1);
  const ChipSpecification rzry = load_chip(chip_json(1, {}, kRzRyGates, ""));
  NativizeOptions o;
  o.verbatim_zyz = false;
  for (int i = 0; i < 100; ++i) {
    const Matrix u = random_unitary(2, rng);
    for (const auto* chip : {&pair, &rxrz, &rzry}) {
      auto s = synthesize_1q_native(u, 0, *chip, o);
      REQUIRE(s.has_value());
      CHECK(all_native(*s, *chip));
      CHECK(equiv_up_to_phase(sequence_matrix(*s, {0}), u, 1e-8));
      CHECK(s->size() <= 5);
    }
  }
  // Known short forms.
  CHECK(synthesize_1q_native(gate_matrix("H", {}), 0, rxrz, o)->size() == 3);
  CHECK(synthesize_1q_native(rx(kPi / 2), 0, pair, o)->size() == 1);
  CHECK(synthesize_1q_native(Matrix::Identity(2, 2), 0, pair, o)->empty());
  CHECK(synthesize_1q_native(gate_matrix("Z", {}), 0, pair, o)->size() == 1);
  // Verbatim Euler form on an RZ/RY chip.
  const auto h = synthesize_1q_native(gate_matrix("H", {}), 0, rzry, {});
  CHECK(text(*h) == "RZ(pi) 0\nRY(pi/2) 0\nRZ(0) 0\n");
}

TEST_CASE("two-qubit synthesis on each entangler set") {
  std::mt19937_64 rng(4);
  GateDefinitions defs;
  const std::vector<std::string> sets = {
      kCzGate, R"({"operator": "ISWAP"})", R"({"operator": "CPHASE", "parameters": ["_"]})",
      R"({"operator": "CNOT"})", R"({"operator": "CZ"}, {"operator": "ISWAP"})"};
  for (const auto& link : sets) {
    const ChipSpecification chip = chip_with(kRxRzGates, link);
    for (int i = 0; i < 15; ++i) {
      define_gate(defs, "U", random_unitary(4, rng));
      const GateApplication g{"U", {}, {1, 0}};
      NativizeOptions o;
      o.defs = &defs;
      const GateSeq out = nativize_gate(g, chip, o);
      CHECK(all_native(out, chip));
      int two = 0;
      for (const auto& x : out) two += x.qubits.size() == 2;
      CHECK(two <= 3);
      CHECK(same_unitary(out, {g}, 1e-8, defs));
    }
  }
}

TEST_CASE("lowering multi-qubit gates") {
  const GateSeq templ = lower_multiqubit(gate("CCNOT", {}, {2, 0, 1}), {});
  CHECK(count_named(templ, "CNOT") == 6);
  CHECK(same_unitary(templ, {gate("CCNOT", {}, {2, 0, 1})}));
  NativizeOptions no_template;
  no_template.ccnot_template = false;
  const GateSeq generic = lower_multiqubit(gate("CCNOT", {}, {2, 0, 1}), no_template);
  CHECK(same_unitary(generic, {gate("CCNOT", {}, {2, 0, 1})}));
  for (const auto& g : generic) CHECK(g.qubits.size() <= 2);
}

// Soundness: each rule, 200 random windows it accepts.
TEST_CASE("rule soundness on random windows") {
  for (const auto& s : sweep_rules(200, 1e-8)) {
    std::string bad;
    for (const auto& w : s.bad) bad += text(w) + "--\n";
    INFO(s.rule << "\n" << bad);
    CHECK(s.windows == 200);
    CHECK(s.applied == 200);
    CHECK(s.sound == s.applied);
  }
}
