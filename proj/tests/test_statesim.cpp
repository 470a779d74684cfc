#include <numbers>

#include "qcc/statesim.hpp"
#include "support.hpp"

using namespace qcc;
using namespace qcc::testing;

namespace {

constexpr double kPi = std::numbers::pi;

Vector ket(std::initializer_list<Complex> amps) {
  Vector v(static_cast<long>(amps.size()));
  long i = 0;
  for (Complex a : amps) v(i++) = a;
  return v;
}

// Dense state after seq on |0...0> over `qubits`.
Vector run_state(const GateSeq& seq, const std::vector<int>& qubits) {
  const Matrix u = reference_unitary(seq, qubits);
  return u.col(0);
}

std::vector<Instruction> as_program(const GateSeq& seq) { return {seq.begin(), seq.end()}; }

}  // namespace

TEST_CASE("partial simulation tracks small components") {
  const auto states = partial_simulate(as_program({gate("X", {}, {0}), gate("H", {}, {1})}), 3);
  REQUIRE(states.size() == 2);
  const StateAnnotation* c = states[1].component_of(0);
  REQUIRE(c);
  CHECK(collinear(c->amplitudes, ket({0, 1})));

  PartialSimulator sim(3);
  sim.apply(gate("H", {}, {0}));
  sim.apply(gate("CNOT", {}, {0, 1}));
  const StateAnnotation* bell = sim.state().component_of(1);
  REQUIRE(bell);
  CHECK(bell->qubits == std::vector<int>{0, 1});
  const double r = 1 / std::sqrt(2.0);
  CHECK(collinear(bell->amplitudes, ket({r, 0, 0, r})));
}

TEST_CASE("symbolic gates and measurements stop tracking") {
  PartialSimulator sim(3);
  sim.apply(gate("H", {}, {0}));
  sim.apply(gate("RZ", {ParamExpr::variable("t")}, {0}));
  CHECK_FALSE(sim.state().tracked(0));
  CHECK(sim.state().component_of(0) == nullptr);
  sim.apply(gate("CNOT", {}, {0, 1}));
  CHECK_FALSE(sim.state().tracked(1));

  sim.apply(gate("X", {}, {2}));
  sim.apply(Measure{2, MemoryRef{"ro", 0}});
  CHECK_FALSE(sim.state().tracked(2));
  CHECK(sim.state().tracked(3));
}

TEST_CASE("entanglement limit is respected") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int trial = 0; trial < 30; ++trial) {
    PartialSimulator sim(3);
    for (int i = 0; i < 25; ++i) {
      const int a = static_cast<int>(rng() % 5);
      const int b = static_cast<int>((a + 1 + rng() % 4) % 5);
      if (rng() % 2) {
        sim.apply(gate("RY", {angle(rng)}, {a}));
      } else {
        sim.apply(gate("CNOT", {}, {a, b}));
      }
      for (const auto& c : sim.state().components) {
        CHECK(c.qubits.size() <= 3);
        CHECK(std::abs(c.amplitudes.norm() - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("eigenvector elision") {
  PartialState zero;
  CHECK(acts_as_eigenvector(gate("CZ", {}, {0, 1}), zero, 3));
  CHECK(acts_as_eigenvector(gate("RZ", {1.234}, {0}), zero, 3));
  CHECK_FALSE(acts_as_eigenvector(gate("H", {}, {0}), zero, 3));
  CHECK_FALSE(acts_as_eigenvector(gate("RZ", {ParamExpr::variable("t")}, {0}), zero, 3));

  RuleContext ctx;
  StateAnnotation s{{0}, ket({1, 0})};
  ctx.state = &s;
  const GateSeq w{gate("CZ", {}, {0, 1})};
  // Qubit 1 is outside the supplied annotation.
  CHECK_FALSE(find_rule("elide-applications-on-eigenvectors").apply(w, ctx).has_value());
  StateAnnotation s2{{0, 1}, ket({1, 0, 0, 0})};
  ctx.state = &s2;
  CHECK(find_rule("elide-applications-on-eigenvectors").apply(w, ctx)->empty());
}

TEST_CASE("state preparation") {
  const ChipSpecification chip = cz_line(2);
  NativizeOptions o;
  CHECK(state_prep_resynthesize(ket({1, 0}), {0}, chip, o).empty());

  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const Vector t1 = random_unitary(2, rng).col(0);
    const GateSeq s1 = state_prep_resynthesize(t1, {1}, chip, o);
    CHECK(all_native(s1, chip));
    CHECK(count_named(s1, "CZ") == 0);
    CHECK(collinear(run_state(s1, {1}), t1, 1e-8));

    const Vector t2 = random_unitary(4, rng).col(0);
    const GateSeq s2 = state_prep_resynthesize(t2, {0, 1}, chip, o);
    CHECK(all_native(s2, chip));
    CHECK(count_named(s2, "CZ") == 1);
    CHECK(collinear(run_state(s2, {0, 1}), t2, 1e-8));
  }

  const double r = 1 / std::sqrt(2.0);
  const GateSeq bell = state_prep_resynthesize(ket({r, 0, 0, r}), {0, 1}, chip, o);
  CHECK(count_named(bell, "CZ") == 1);
  CHECK(collinear(run_state(bell, {0, 1}), ket({r, 0, 0, r}), 1e-8));

  const Vector product = kron(ket({r, r}), ket({0, 1}));
  const GateSeq p = state_prep_resynthesize(product, {1, 0}, chip, o);
  CHECK(count_named(p, "CZ") == 0);
  CHECK(collinear(run_state(p, {1, 0}), product, 1e-8));
}

TEST_CASE("state-aware pass preserves the output state") {
  const ChipSpecification chip = cz_line(4);
  NativizeOptions o;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int trial = 0; trial < 60; ++trial) {
    GateSeq seq;
    for (int i = 0; i < 12; ++i) {
      const int a = static_cast<int>(rng() % 3);
      switch (rng() % 4) {
        case 0: seq.push_back(gate("CZ", {}, {a, a + 1})); break;
        case 1: seq.push_back(gate("RX", {kPi / 2}, {a})); break;
        case 2: seq.push_back(gate("RZ", {angle(rng)}, {a + 1})); break;
        default: seq.push_back(gate("RX", {-kPi / 2}, {a + 1})); break;
      }
    }
    for (bool prep : {false, true}) {
      StatePassStats stats;
      const GateSeq out = state_aware_pass(seq, chip, o, 3, prep, &stats);
      CHECK(all_native(out, chip));
      const std::vector<int> qs{0, 1, 2, 3};
      CHECK(collinear(run_state(out, qs), run_state(seq, qs), 1e-8));
      CHECK(count_named(out, "CZ") <= count_named(seq, "CZ"));
    }
  }
}

TEST_CASE("CZs on basis-state partners are elided") {
  const ChipSpecification chip = cz_line(3);
  // Qubits 1 and 2 stay in |0>, so both CZs act on eigenvectors.
  const GateSeq seq{gate("RX", {kPi / 2}, {0}), gate("CZ", {}, {0, 1}), gate("CZ", {}, {1, 2})};
  StatePassStats stats;
  const GateSeq out = state_aware_pass(seq, chip, {}, 3, false, &stats);
  CHECK(stats.elided == 2);
  CHECK(count_named(out, "CZ") == 0);
}
