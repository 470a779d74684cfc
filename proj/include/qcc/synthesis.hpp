#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcc/linalg.hpp"

namespace qcc {

struct ZyzAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phase = 0.0;
};

// U = e^{i phase} RZ(gamma) RY(beta) RZ(alpha); beta in [0, pi].
ZyzAngles zyz_decompose(const Matrix& u);
Matrix zyz_matrix(const ZyzAngles& a);

// Element of a synthesized circuit on local qubits. Local ops carry an
// arbitrary 2x2 unitary; entanglers are the usual two-qubit gates.
struct SynthOp {
  enum class Kind { Local, CZ, CNOT, ISWAP, CPHASE };
  Kind kind = Kind::Local;
  std::vector<int> qubits;  // Local: {q}; CNOT: {control, target}; others: {a, b}
  Matrix local;             // Local only
  double angle = 0.0;       // CPHASE only

  static SynthOp make_local(int q, Matrix m);
  static SynthOp make_entangler(Kind k, int a, int b, double angle = 0.0);
  bool is_entangler() const { return kind != Kind::Local; }
};

using SynthCircuit = std::vector<SynthOp>;

// Matrix of a circuit on n local qubits (qubit 0 = most significant bit).
Matrix circuit_matrix(const SynthCircuit& c, int n);
int entangler_count(const SynthCircuit& c);
// Fuses runs of local ops per qubit and drops identities.
SynthCircuit merge_locals(const SynthCircuit& c);

// Native two-qubit interactions available for synthesis on one link.
struct EntanglerOptions {
  bool cz = false;       // CZ (or CPHASE(pi)) available
  bool iswap = false;
  bool cphase = false;   // CPHASE with free angle
  bool cnot = false;     // CNOT in either orientation
  double cz_cost = 1.0;
  double iswap_cost = 1.0;
  double cphase_cost = 1.0;
};

// Interaction class coordinates for a two-qubit unitary.
struct WeylCoordinates {
  double x = 0.0, y = 0.0, z = 0.0;
};
WeylCoordinates weyl_coordinates(const Matrix& u);

// Minimal-entangler synthesis of a 4x4 unitary. CNOT-only links get a
// CZ-based circuit; the caller maps CZ onto CNOT. Throws SynthesisError when
// no supported entangler is available.
SynthCircuit synthesize_two_qubit(const Matrix& u, const EntanglerOptions& options);

// Smallest number of CZ gates needed for u (0..3).
int cz_count(const Matrix& u);

// Synthesis against one named entangler (CZ, CNOT or ISWAP), returned as
// gates on qubits 0 and 1 with one-qubit parts written as RZ/RY/RZ.
std::vector<GateApplication> kak_synthesize(const Matrix& u, const std::string& entangler);

// Two-level decomposition for 2..4 qubits into one-qubit gates and CNOTs.
SynthCircuit generic_synthesize_ops(const Matrix& u);
std::vector<GateApplication> generic_synthesize(const Matrix& u);

// Writes local ops as RZ/RY/RZ (zero rotations omitted).
std::vector<GateApplication> to_gate_applications(const SynthCircuit& c);

}  // namespace qcc
