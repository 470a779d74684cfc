#include <numbers>

#include "qcc/errors.hpp"
#include "qcc/parser.hpp"
#include "support.hpp"

using namespace qcc;

namespace {

constexpr double kPi = std::numbers::pi;

const char* kQaoa = R"(DECLARE beta  REAL
DECLARE gamma REAL
DECLARE ro    BIT[3]
H 0
H 1
H 2
CPHASE(beta) 0 1
CPHASE(beta) 0 2
CPHASE(beta) 1 2
RX(gamma) 0
RX(gamma) 1
RX(gamma) 2
MEASURE 0 ro[0]
MEASURE 1 ro[1]
MEASURE 2 ro[2]
)";

const char* kReset = R"(DECLARE s BIT
DEFCIRCUIT RESET q scratch:
    MEASURE q scratch
    JUMP-UNLESS @done scratch
    X q
    LABEL @done
)";

const GateApplication& as_gate(const Instruction& i) { return std::get<GateApplication>(i); }

}  // namespace

TEST_CASE("minimal program") {
  const Program p = parse_program("H 0\nCNOT 0 1");
  REQUIRE(p.body.size() == 2);
  CHECK(as_gate(p.body[0]).name == "H");
  CHECK(as_gate(p.body[1]).qubits == std::vector<int>{0, 1});
}

TEST_CASE("qaoa listing") {
  const Program p = parse_program(kQaoa);
  CHECK(p.declarations.size() == 3);
  REQUIRE(p.body.size() == 12);
  int measures = 0;
  for (size_t i = 0; i < p.body.size(); ++i) {
    if (const auto* m = std::get_if<Measure>(&p.body[i])) {
      CHECK(m->target.name == "ro");
      CHECK(m->target.index == measures);
      CHECK(m->qubit == measures);
      ++measures;
    }
  }
  CHECK(measures == 3);
  const auto& cp = as_gate(p.body[3]);
  CHECK(cp.name == "CPHASE");
  CHECK(cp.params[0] == ParamExpr::variable("beta"));
  CHECK_FALSE(cp.is_concrete());
}

TEST_CASE("affine parameter folding") {
  const Program p = parse_program("DECLARE a REAL\nRZ(0.2+1.5*a) 0");
  REQUIRE(p.body.size() == 1);
  const ParamExpr& e = as_gate(p.body[0]).params[0];
  CHECK(e.constant() == Catch::Approx(0.2));
  REQUIRE(e.terms().size() == 1);
  CHECK(e.terms().at("a") == Catch::Approx(1.5));
  CHECK(format_param(e) == "0.2 + 1.5*a");

  const Program q = parse_program("DECLARE a REAL\nRZ(a + 0.5*a + 0.2) 0\nRX(-pi/2) 1\nRY(2*(a/6) - a/3) 2");
  CHECK(as_gate(q.body[0]).params[0] == e);
  CHECK(as_gate(q.body[1]).params[0].value() == Catch::Approx(-kPi / 2));
  CHECK(as_gate(q.body[2]).params[0] == ParamExpr(0.0));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_program("H 0\nCNOT 0 1 2\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_program("MEASURE 0 ro[0]"), ParseError);
  CHECK_THROWS_AS(parse_program("CNOT 0 0"), ParseError);
  CHECK_THROWS_AS(parse_program("RZ(a) 0"), ParseError);
  CHECK_THROWS_AS(parse_program("DECLARE a REAL\nRZ(a*a) 0"), ParseError);
  CHECK_THROWS_AS(parse_program("DECLARE a REAL\nRZ(sin(a)) 0"), ParseError);
  CHECK_THROWS_AS(parse_program("FOO 0"), ParseError);
  CHECK_THROWS_AS(parse_program("H -1"), ParseError);
  CHECK_THROWS_AS(parse_program("DEFGATE G:\n    1, 0, 0\n    0, 1, 0\n    0, 0, 1\nG 0"), ParseError);
  CHECK_THROWS_AS(parse_program("DEFGATE H:\n    1, 0\n    0, 1\n"), ParseError);
}

TEST_CASE("defgate with parameters") {
  const Program p = parse_program(R"(DECLARE t REAL
DEFGATE PH(%theta):
    1, 0
    0, cis(%theta)
PH(pi/3) 1
)");
  REQUIRE(p.gate_definitions.count("PH"));
  CHECK(p.gate_definitions.at("PH").arity() == 1);
  const Matrix m = gate_matrix(as_gate(p.body[0]), p.gate_definitions);
  CHECK(std::abs(m(1, 1) - std::polar(1.0, kPi / 3)) < 1e-12);
}

TEST_CASE("circuit expansion") {
  const Program p = expand_circuits(parse_program(std::string(kReset) + "RESET 3 s\n"));
  REQUIRE(p.body.size() == 4);
  CHECK(format_instruction(p.body[0]) == "MEASURE 3 s");
  CHECK(format_instruction(p.body[1]) == "JUMP-UNLESS @done_1 s");
  CHECK(format_instruction(p.body[2]) == "X 3");
  CHECK(format_instruction(p.body[3]) == "LABEL @done_1");
  for (const auto& i : p.body) CHECK_FALSE(std::holds_alternative<CircuitCall>(i));

  const Program twice = expand_circuits(parse_program(std::string(kReset) + "RESET 0 s\nRESET 1 s\n"));
  REQUIRE(twice.body.size() == 8);
  CHECK(std::get<Label>(twice.body[3]).name != std::get<Label>(twice.body[7]).name);

  const Program plain = parse_program("H 0\nCNOT 0 1");
  CHECK(structurally_equal(expand_circuits(plain), plain));

  CHECK_THROWS(expand_circuits(parse_program(std::string(kReset) + "RESET 3\n")));
  CHECK_THROWS(expand_circuits(parse_program("DEFCIRCUIT A q:\n    B q\nDEFCIRCUIT B q:\n    A q\nA 0\n")));
}

TEST_CASE("simplify_param") {
  const ParamExpr a = ParamExpr::variable("a");
  const ParamExpr t = ParamExpr::variable("t");
  const ParamExpr s = simplify_param(a + 0.5 * a + ParamExpr(0.2));
  CHECK(s.constant() == Catch::Approx(0.2));
  CHECK(s.terms().at("a") == Catch::Approx(1.5));
  CHECK(simplify_param(t + (-t)) == ParamExpr(0.0));
  CHECK(simplify_param(t + (-t)).terms().empty());
  const ParamExpr third = simplify_param(2.0 * (t * (1.0 / 6.0)));
  CHECK(third.terms().at("t") == Catch::Approx(1.0 / 3.0));
  CHECK(format_param(third) == "t/3");
}

TEST_CASE("simplify_param properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  const char* names[] = {"a", "b", "theta"};
  auto random_expr = [&] {
    ParamExpr e(u(rng));
    for (const char* n : names) {
      if (rng() % 2) e += ParamExpr::variable(n, u(rng));
    }
    return e;
  };
  for (int i = 0; i < 200; ++i) {
    const ParamExpr x = random_expr();
    const ParamExpr y = random_expr();
    CHECK(simplify_param(simplify_param(x)) == simplify_param(x));
    CHECK(simplify_param(x + y) == simplify_param(simplify_param(x) + simplify_param(y)));
    const std::map<std::string, double> env = {{"a", u(rng)}, {"b", u(rng)}, {"theta", u(rng)}};
    CHECK(simplify_param(x).evaluate(env) == Catch::Approx(x.evaluate(env)));
  }
}

TEST_CASE("real formatting") {
  CHECK(format_real(kPi) == "pi");
  CHECK(format_real(-kPi / 2) == "-pi/2");
  CHECK(format_real(3 * kPi / 4) == "3*pi/4");
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(0.1) == "0.1");
}

TEST_CASE("print and reparse round trip") {
  const std::string sources[] = {
      kQaoa,
      std::string(kReset) + "RESET 3 s\nH 0\n",
      "DECLARE a REAL\nDECLARE ro BIT[2]\nRZ(0.2+1.5*a) 0\nLABEL @top\nPRAGMA NOISY \"x\"\nJUMP-WHEN @top ro[1]\n"
      "MEASURE 0\nJUMP @end\nLABEL @end\nCPHASE(pi/7) 1 2\n",
      "DEFGATE PH(%theta):\n    1, 0\n    0, cis(%theta)\nPH(0.25) 4\n",
  };
  for (const auto& src : sources) {
    const Program p = parse_program(src);
    const std::string printed = print_program(p);
    const Program again = parse_program(printed);
    CHECK(structurally_equal(p, again));
    CHECK(print_program(again) == printed);
  }
}

TEST_CASE("random program round trip") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-7, 7);
  const std::vector<std::pair<std::string, int>> gates = {{"H", 1}, {"X", 1}, {"CNOT", 2}, {"CZ", 2},
                                                           {"RZ", 1}, {"RX", 1}, {"CPHASE", 2}, {"CCNOT", 3}};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text = "DECLARE a REAL\n";
    for (int g = 0; g < 15; ++g) {
      const auto& [name, arity] = gates[rng() % gates.size()];
      std::vector<int> qs = {0, 1, 2, 3, 4};
      std::shuffle(qs.begin(), qs.end(), rng);
      text += name;
      if (name == "RZ" || name == "RX" || name == "CPHASE") {
        text += "(" + std::to_string(angle(rng)) + (rng() % 2 ? " + a" : "") + ")";
      }
      for (int k = 0; k < arity; ++k) text += " " + std::to_string(qs[static_cast<size_t>(k)]);
      text += "\n";
    }
    const Program p = parse_program(text);
    CHECK(structurally_equal(p, parse_program(print_program(p))));
  }
}
