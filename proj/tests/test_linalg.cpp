#include <numbers>

#include "qcc/errors.hpp"
#include "qcc/synthesis.hpp"
#include "support.hpp"

using namespace qcc;
using qcc::testing::random_unitary;
using qcc::testing::reference_unitary;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("builtin gate matrices") {
  CHECK(gate_matrix("RZ", {0.0}).isApprox(Matrix::Identity(2, 2)));
  CHECK(gate_matrix("CPHASE", {2 * kPi}).isApprox(Matrix::Identity(4, 4), 1e-12));

  // Truth table of CCNOT: only |110> and |111> are exchanged.
  const Matrix ccnot = gate_matrix("CCNOT", {});
  for (int x = 0; x < 8; ++x) {
    const int expected = x >= 6 ? (x ^ 1) : x;
    for (int y = 0; y < 8; ++y) CHECK(std::abs(ccnot(y, x) - Complex(y == expected ? 1.0 : 0.0)) < 1e-15);
  }
  for (const char* name : {"I", "X", "Y", "Z", "H", "S", "T", "CNOT", "CZ", "SWAP", "ISWAP", "CCNOT"}) {
    CHECK(is_unitary(gate_matrix(name, {})));
  }
}

TEST_CASE("equivalence up to global phase") {
  const Matrix h = gate_matrix("H", {});
  const Matrix product = std::exp(Complex(0, kPi / 2)) * ry(kPi / 2) * rz(kPi);
  CHECK(equiv_up_to_phase(h, h));
  CHECK(equiv_up_to_phase(h, product));
  CHECK_FALSE(equiv_up_to_phase(gate_matrix("X", {}), gate_matrix("Z", {})));
  CHECK_THROWS(equiv_up_to_phase(h, Matrix::Identity(4, 4)));
}

TEST_CASE("sequence matrix agrees with the reference simulator") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::vector<GateApplication> seq = {
      {"H", {}, {2}},           {"CNOT", {}, {2, 0}}, {"RX", {angle(rng)}, {1}}, {"CCNOT", {}, {1, 2, 0}},
      {"ISWAP", {}, {0, 1}},    {"CPHASE", {angle(rng)}, {2, 1}}, {"T", {}, {0}},
  };
  const std::vector<int> qubits = {0, 1, 2};
  CHECK(sequence_matrix(seq, qubits).isApprox(reference_unitary(seq, qubits), 1e-12));
}

TEST_CASE("zyz decomposition") {
  const ZyzAngles id = zyz_decompose(Matrix::Identity(2, 2));
  CHECK(std::abs(id.alpha) < 1e-12);
  CHECK(std::abs(id.beta) < 1e-12);
  CHECK(std::abs(id.gamma) < 1e-12);
  CHECK(std::abs(id.phase) < 1e-12);

  const ZyzAngles h = zyz_decompose(gate_matrix("H", {}));
  CHECK(h.alpha == Catch::Approx(kPi));
  CHECK(h.beta == Catch::Approx(kPi / 2));
  CHECK(std::abs(h.gamma) < 1e-12);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Matrix u = random_unitary(2, rng);
    const ZyzAngles a = zyz_decompose(u);
    CHECK(a.beta >= 0.0);
    CHECK(a.beta <= kPi + 1e-12);
    CHECK((zyz_matrix(a) - u).cwiseAbs().maxCoeff() < 1e-9);
    const ZyzAngles again = zyz_decompose(zyz_matrix(a));
    CHECK(std::abs(std::remainder(again.alpha - a.alpha, 2 * kPi)) < 1e-9);
    CHECK(std::abs(std::remainder(again.gamma - a.gamma, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("zyz handles degenerate rotations") {
  for (double t : {0.3, -2.0, kPi}) {
    const ZyzAngles z = zyz_decompose(rz(t));
    CHECK(std::abs(z.beta) < 1e-12);
    CHECK(std::abs(z.gamma) < 1e-12);
    CHECK(equiv_up_to_phase(zyz_matrix(z), rz(t), 1e-12));
  }
  const ZyzAngles x = zyz_decompose(gate_matrix("X", {}));
  CHECK(x.beta == Catch::Approx(kPi));
  CHECK(std::abs(x.gamma) < 1e-12);
}

TEST_CASE("two-qubit synthesis with CNOT") {
  auto swap3 = kak_synthesize(gate_matrix("SWAP", {}), "CNOT");
  CHECK(testing::count_named(swap3, "CNOT") == 3);
  CHECK(equiv_up_to_phase(sequence_matrix(swap3, {0, 1}), gate_matrix("SWAP", {})));

  auto local = kak_synthesize(kron(rx(0.4), ry(1.1)), "CNOT");
  CHECK(testing::count_named(local, "CNOT") == 0);
  CHECK(equiv_up_to_phase(sequence_matrix(local, {0, 1}), kron(rx(0.4), ry(1.1))));
  CHECK(kak_synthesize(Matrix::Identity(4, 4), "CZ").empty());
}

TEST_CASE("random two-qubit unitaries need at most three entanglers") {
  std::mt19937_64 rng(2024);
  for (int seed = 0; seed < 100; ++seed) {
    const Matrix u = random_unitary(4, rng);
    for (const char* ent : {"CZ", "CNOT", "ISWAP"}) {
      auto seq = kak_synthesize(u, ent);
      CHECK(testing::count_named(seq, ent) <= 3);
      CHECK(equiv_up_to_phase(reference_unitary(seq, {0, 1}), u, 1e-8));
    }
  }
}

TEST_CASE("entangler counts of known gates") {
  CHECK(cz_count(gate_matrix("CNOT", {})) == 1);
  CHECK(cz_count(gate_matrix("CZ", {})) == 1);
  CHECK(cz_count(gate_matrix("ISWAP", {})) == 2);
  CHECK(cz_count(gate_matrix("SWAP", {})) == 3);
  CHECK(cz_count(kron(gate_matrix("H", {}), rz(0.3))) == 0);
  CHECK(cz_count(gate_matrix("CPHASE", {0.7})) == 2);

  EntanglerOptions iswap_only;
  iswap_only.iswap = true;
  CHECK(entangler_count(synthesize_two_qubit(gate_matrix("CNOT", {}), iswap_only)) == 2);
  CHECK(entangler_count(synthesize_two_qubit(gate_matrix("SWAP", {}) * gate_matrix("CZ", {}), iswap_only)) == 1);

  EntanglerOptions cphase_only;
  cphase_only.cphase = true;
  const Matrix cp = gate_matrix("CPHASE", {0.7});
  auto c = synthesize_two_qubit(cp, cphase_only);
  CHECK(entangler_count(c) == 1);
  CHECK(equiv_up_to_phase(circuit_matrix(c, 2), cp));

  EntanglerOptions mixed;
  mixed.cz = mixed.iswap = true;
  // SWAP.CNOT is locally an iSWAP; SWAP alone needs one of each.
  const Matrix swap_cnot = gate_matrix("SWAP", {}) * gate_matrix("CNOT", {});
  CHECK(entangler_count(synthesize_two_qubit(swap_cnot, mixed)) == 1);
  const Matrix swap = gate_matrix("SWAP", {});
  auto m = synthesize_two_qubit(swap, mixed);
  CHECK(entangler_count(m) == 2);
  CHECK(equiv_up_to_phase(circuit_matrix(m, 2), swap));
}

TEST_CASE("generic synthesis") {
  const Matrix ccnot = gate_matrix("CCNOT", {});
  auto seq = generic_synthesize(ccnot);
  CHECK(equiv_up_to_phase(reference_unitary(seq, {0, 1, 2}), ccnot, 1e-7));

  CHECK(generic_synthesize(Matrix::Identity(8, 8)).empty());

  std::mt19937_64 rng(99);
  for (int dim : {4, 8, 16}) {
    for (int i = 0; i < 3; ++i) {
      const Matrix u = random_unitary(dim, rng);
      auto s = generic_synthesize(u);
      std::vector<int> qubits;
      for (int q = 0; (1 << q) < dim; ++q) qubits.push_back(q);
      CHECK(equiv_up_to_phase(reference_unitary(s, qubits), u, 1e-7));
    }
  }
  CHECK_THROWS_AS(generic_synthesize(Matrix::Identity(32, 32)), SynthesisError);
}
