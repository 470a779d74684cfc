#include "qcc/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qcc/errors.hpp"

namespace qcc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);

double wrap_angle(double a) {
  // Into (-pi, pi].
  a = std::remainder(a, 2 * kPi);
  if (a <= -kPi) a += 2 * kPi;
  return a;
}

bool is_identity_up_to_phase(const Matrix& m, double tol = 1e-10) {
  return equiv_up_to_phase(m, Matrix::Identity(m.rows(), m.cols()), tol);
}

}  // namespace

ZyzAngles zyz_decompose(const Matrix& u) {
  Complex det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  if (std::abs(det.imag()) < 1e-12) det = Complex(det.real(), 0.0);
  ZyzAngles out;
  out.phase = std::arg(det) / 2;
  const Matrix v = u * std::exp(-kI * out.phase);
  const Complex a = v(0, 0);
  const Complex b = v(1, 0);
  out.beta = 2 * std::atan2(std::abs(b), std::abs(a));
  if (std::abs(b) < 1e-12) {
    out.gamma = 0.0;
    out.alpha = -2 * std::arg(a);
  } else if (std::abs(a) < 1e-12) {
    out.gamma = 0.0;
    out.alpha = -2 * std::arg(b);
  } else {
    out.gamma = std::arg(b) - std::arg(a);
    out.alpha = -std::arg(a) - std::arg(b);
  }
  // Shifting an RZ angle by 2pi flips the sign of the matrix.
  for (double* angle : {&out.alpha, &out.gamma}) {
    const double w = wrap_angle(*angle);
    if (std::abs(std::remainder((w - *angle) / (2 * kPi), 2.0)) > 0.5) out.phase += kPi;
    *angle = w;
  }
  out.phase = wrap_angle(out.phase);
  return out;
}

Matrix zyz_matrix(const ZyzAngles& a) {
  return std::exp(kI * a.phase) * rz(a.gamma) * ry(a.beta) * rz(a.alpha);
}

SynthOp SynthOp::make_local(int q, Matrix m) {
  SynthOp op;
  op.kind = Kind::Local;
  op.qubits = {q};
  op.local = std::move(m);
  return op;
}

SynthOp SynthOp::make_entangler(Kind k, int a, int b, double angle) {
  SynthOp op;
  op.kind = k;
  op.qubits = {a, b};
  op.angle = angle;
  return op;
}

namespace {

Matrix entangler_matrix(const SynthOp& op) {
  switch (op.kind) {
    case SynthOp::Kind::CZ: return gate_matrix("CZ", {});
    case SynthOp::Kind::CNOT: return gate_matrix("CNOT", {});
    case SynthOp::Kind::ISWAP: return gate_matrix("ISWAP", {});
    case SynthOp::Kind::CPHASE: return gate_matrix("CPHASE", {op.angle});
    case SynthOp::Kind::Local: break;
  }
  return op.local;
}

}  // namespace

Matrix circuit_matrix(const SynthCircuit& c, int n) {
  Matrix u = Matrix::Identity(1L << n, 1L << n);
  for (const auto& op : c) apply_matrix(u, op.kind == SynthOp::Kind::Local ? op.local : entangler_matrix(op), op.qubits, n);
  return u;
}

int entangler_count(const SynthCircuit& c) {
  return static_cast<int>(std::count_if(c.begin(), c.end(), [](const SynthOp& o) { return o.is_entangler(); }));
}

SynthCircuit merge_locals(const SynthCircuit& c) {
  int n = 0;
  for (const auto& op : c) {
    for (int q : op.qubits) n = std::max(n, q + 1);
  }
  std::vector<std::optional<Matrix>> pending(static_cast<size_t>(n));
  SynthCircuit out;
  auto flush = [&](int q) {
    auto& p = pending[static_cast<size_t>(q)];
    if (p && !is_identity_up_to_phase(*p)) out.push_back(SynthOp::make_local(q, *p));
    p.reset();
  };
  for (const auto& op : c) {
    if (op.kind == SynthOp::Kind::Local) {
      auto& p = pending[static_cast<size_t>(op.qubits[0])];
      p = p ? Matrix(op.local * *p) : op.local;
      continue;
    }
    for (int q : op.qubits) flush(q);
    out.push_back(op);
  }
  for (int q = 0; q < n; ++q) flush(q);
  return out;
}

namespace {

const Matrix& magic_basis() {
  static const Matrix b = [] {
    Matrix m(4, 4);
    const double r = 1.0 / std::sqrt(2.0);
    m << r, 0, 0, kI * r,  //
        0, kI * r, r, 0,   //
        0, kI * r, -r, 0,  //
        r, 0, 0, -kI * r;
    return m;
  }();
  return b;
}

Matrix to_special(const Matrix& u) {
  const Complex d = u.determinant();
  return u / std::pow(d, 1.0 / static_cast<double>(u.rows()));
}

// Simultaneous real-orthogonal diagonalization of a complex symmetric unitary.
bool diagonalize_symmetric(const Matrix& m, Eigen::Matrix4d& p, Vector& d) {
  static constexpr std::array<double, 5> kMix = {0.6180339887, 1.4142135623, 2.7182818284, 0.3, 3.7};
  for (double c : kMix) {
    const Eigen::Matrix4d a = m.real() + c * m.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(a);
    p = es.eigenvectors();
    const Matrix pc = p.cast<Complex>();
    const Matrix dm = pc.transpose() * m * pc;
    Matrix off = dm;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 1e-9) continue;
    if (p.determinant() < 0) p.col(0) *= -1.0;
    d = dm.diagonal();
    return true;
  }
  return false;
}

// Splits a 4x4 tensor product K = A (x) B.
std::pair<Matrix, Matrix> split_local(const Matrix& k) {
  int bi = 0, bj = 0;
  double best = -1;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double nrm = k.block(2 * i, 2 * j, 2, 2).norm();
      if (nrm > best) best = nrm, bi = i, bj = j;
    }
  }
  Matrix b = k.block(2 * bi, 2 * bj, 2, 2);
  b /= std::sqrt(b.determinant());
  Matrix a(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) a(i, j) = (b.adjoint() * k.block(2 * i, 2 * j, 2, 2)).trace() / 2.0;
  }
  return {a, b};
}

struct Alignment {
  Matrix left;
  Matrix right;
};

// Finds local L, R with U ~ L * C * R, if U and C are locally equivalent.
std::optional<Alignment> align(const Matrix& u, const Matrix& c) {
  const Matrix& mb = magic_basis();
  const Matrix us = to_special(u);
  const Matrix cs = to_special(c);
  const Matrix cb = mb.adjoint() * cs * mb;
  Eigen::Matrix4d pc;
  Vector dc;
  if (!diagonalize_symmetric(cb.transpose() * cb, pc, dc)) return std::nullopt;
  for (Complex s : {Complex(1.0), kI}) {
    const Matrix ub = mb.adjoint() * (s * us) * mb;
    Eigen::Matrix4d pu;
    Vector du;
    if (!diagonalize_symmetric(ub.transpose() * ub, pu, du)) continue;
    std::array<int, 4> perm = {0, 1, 2, 3};
    do {
      double err = 0;
      for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(du(i) - dc(perm[static_cast<size_t>(i)])));
      if (err > 1e-7) continue;
      Eigen::Matrix4d pc2;
      for (int i = 0; i < 4; ++i) pc2.col(i) = pc.col(perm[static_cast<size_t>(i)]);
      if (pc2.determinant() < 0) pc2.col(0) *= -1.0;
      Vector dl = du.cwiseSqrt();
      Matrix o1u = ub * pu.cast<Complex>() * dl.cwiseInverse().asDiagonal();
      if (o1u.determinant().real() < 0) {
        dl(0) = -dl(0);
        o1u = ub * pu.cast<Complex>() * dl.cwiseInverse().asDiagonal();
      }
      const Matrix o1c = cb * pc2.cast<Complex>() * dl.cwiseInverse().asDiagonal();
      Alignment al;
      al.left = mb * o1u * o1c.transpose() * mb.adjoint();
      al.right = mb * pc2.cast<Complex>() * pu.transpose().cast<Complex>() * mb.adjoint();
      if (equiv_up_to_phase(u, al.left * c * al.right, 1e-9)) return al;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return std::nullopt;
}

// Eigenphases of the magic-basis invariant M = Ub^T Ub.
std::optional<std::array<double, 4>> invariant_phases(const Matrix& u) {
  const Matrix& mb = magic_basis();
  const Matrix ub = mb.adjoint() * to_special(u) * mb;
  Eigen::Matrix4d p;
  Vector d;
  if (!diagonalize_symmetric(ub.transpose() * ub, p, d)) return std::nullopt;
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[static_cast<size_t>(i)] = std::arg(d(i));
  return out;
}

Matrix h_matrix() { return gate_matrix("H", {}); }

// Template circuits whose matrices serve as alignment targets. Qubit 0 is the
// most significant bit.
SynthCircuit cz_family(int k, double p0 = 0, double p1 = 0, double p2 = 0) {
  using K = SynthOp::Kind;
  SynthCircuit c;
  if (k == 1) {
    c.push_back(SynthOp::make_entangler(K::CZ, 0, 1));
  } else if (k == 2) {
    c.push_back(SynthOp::make_entangler(K::CZ, 0, 1));
    c.push_back(SynthOp::make_local(0, rx(p0)));
    c.push_back(SynthOp::make_local(1, rx(p1)));
    c.push_back(SynthOp::make_entangler(K::CZ, 0, 1));
  } else if (k == 3) {
    // CNOT(1->0); RY(p2) 1; CNOT(0->1); RZ(p0) 0; RY(p1) 1; CNOT(1->0)
    const Matrix h = h_matrix();
    auto cnot = [&](int tgt) {
      c.push_back(SynthOp::make_local(tgt, h));
      c.push_back(SynthOp::make_entangler(K::CZ, 0, 1));
      c.push_back(SynthOp::make_local(tgt, h));
    };
    cnot(0);
    c.push_back(SynthOp::make_local(1, ry(p2)));
    cnot(1);
    c.push_back(SynthOp::make_local(0, rz(p0)));
    c.push_back(SynthOp::make_local(1, ry(p1)));
    cnot(0);
  }
  return c;
}

std::optional<SynthCircuit> realize(const Matrix& u, const SynthCircuit& core) {
  const Matrix c = circuit_matrix(core, 2);
  auto al = align(u, c);
  if (!al) return std::nullopt;
  auto [la, lb] = split_local(al->left);
  auto [ra, rb] = split_local(al->right);
  SynthCircuit out;
  out.push_back(SynthOp::make_local(0, ra));
  out.push_back(SynthOp::make_local(1, rb));
  out.insert(out.end(), core.begin(), core.end());
  out.push_back(SynthOp::make_local(0, la));
  out.push_back(SynthOp::make_local(1, lb));
  out = merge_locals(out);
  if (!equiv_up_to_phase(circuit_matrix(out, 2), u, 1e-9)) return std::nullopt;
  return out;
}

std::vector<std::pair<double, double>> two_cz_candidates(const std::array<double, 4>& mu) {
  static constexpr int kPairs[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  std::vector<std::pair<double, double>> out;
  for (double shift : {0.0, kPi}) {
    for (const auto& pr : kPairs) {
      auto m = [&](int i) { return wrap_angle(mu[static_cast<size_t>(pr[i])] + shift); };
      if (std::abs(wrap_angle(m(0) + m(1))) > 1e-6 || std::abs(wrap_angle(m(2) + m(3))) > 1e-6) continue;
      const double p = m(0), q = m(2);
      out.emplace_back((p + q) / 2, (p - q) / 2);
    }
  }
  return out;
}

std::optional<SynthCircuit> synthesize_cz_exact(const Matrix& u, int k) {
  if (k == 0) return realize(u, {});
  if (k == 1) return realize(u, cz_family(1));
  auto mu = invariant_phases(u);
  if (!mu) return std::nullopt;
  if (k == 2) {
    for (auto [t, f] : two_cz_candidates(*mu)) {
      if (auto c = realize(u, cz_family(2, t, f))) return c;
    }
    return std::nullopt;
  }
  // Interaction coordinates from half the invariant phases, shifted so they sum to zero.
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[static_cast<size_t>(i)] = (*mu)[static_cast<size_t>(i)] / 2;
  double sum = lam[0] + lam[1] + lam[2] + lam[3];
  const int shifts = static_cast<int>(std::lround(sum / kPi));
  for (int i = 0; i < std::abs(shifts); ++i) lam[static_cast<size_t>(i)] -= (shifts > 0 ? 1 : -1) * kPi;
  std::array<int, 4> perm = {0, 1, 2, 3};
  do {
    auto l = [&](int i) { return lam[static_cast<size_t>(perm[static_cast<size_t>(i)])]; };
    const double x = (l(0) + l(1)) / 2, y = (l(1) + l(3)) / 2, z = (l(0) + l(3)) / 2;
    if (auto c = realize(u, cz_family(3, kPi / 2 - 2 * z, 2 * x - kPi / 2, kPi / 2 - 2 * y))) return c;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

Matrix swap_matrix() { return gate_matrix("SWAP", {}); }

// Rewrites a CZ circuit for SWAP^m * U into a circuit for U in which the first
// m CZs (counted from the end of the circuit) become ISWAPs, using
// CZ = SWAP * ISWAP * (S^dag (x) S^dag).
SynthCircuit convert_to_iswap(const SynthCircuit& cz_circuit, int m) {
  Matrix sdg(2, 2);
  sdg << 1, 0, 0, -kI;
  std::vector<size_t> cz_positions;
  for (size_t i = 0; i < cz_circuit.size(); ++i) {
    if (cz_circuit[i].kind == SynthOp::Kind::CZ) cz_positions.push_back(i);
  }
  std::vector<bool> convert(cz_circuit.size(), false);
  for (int j = 0; j < m; ++j) convert[cz_positions[cz_positions.size() - 1 - static_cast<size_t>(j)]] = true;

  // Sequence with explicit SWAP markers (represented by qubits {-1}).
  SynthCircuit seq;
  for (size_t i = 0; i < cz_circuit.size(); ++i) {
    if (!convert[i]) {
      seq.push_back(cz_circuit[i]);
      continue;
    }
    seq.push_back(SynthOp::make_local(0, sdg));
    seq.push_back(SynthOp::make_local(1, sdg));
    seq.push_back(SynthOp::make_entangler(SynthOp::Kind::ISWAP, 0, 1));
    SynthOp marker;
    marker.kind = SynthOp::Kind::Local;
    marker.qubits = {-1};
    seq.push_back(marker);
  }
  for (int j = 0; j < m; ++j) {
    SynthOp marker;
    marker.kind = SynthOp::Kind::Local;
    marker.qubits = {-1};
    seq.push_back(marker);
  }
  // Push every SWAP to the end; an even number of them cancels.
  SynthCircuit out;
  bool swapped = false;
  for (auto op : seq) {
    if (op.qubits.size() == 1 && op.qubits[0] == -1) {
      swapped = !swapped;
      continue;
    }
    if (swapped) {
      for (int& q : op.qubits) q = 1 - q;
    }
    out.push_back(op);
  }
  return merge_locals(out);
}

}  // namespace

WeylCoordinates weyl_coordinates(const Matrix& u) {
  auto mu = invariant_phases(u);
  if (!mu) throw SynthesisError("could not diagonalize two-qubit invariant");
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[static_cast<size_t>(i)] = (*mu)[static_cast<size_t>(i)] / 2;
  std::sort(lam.begin(), lam.end());
  WeylCoordinates w;
  w.x = (lam[0] + lam[1]) / 2;
  w.y = (lam[1] + lam[3]) / 2;
  w.z = (lam[0] + lam[3]) / 2;
  return w;
}

int cz_count(const Matrix& u) {
  for (int k = 0; k < 3; ++k) {
    if (synthesize_cz_exact(u, k)) return k;
  }
  return 3;
}

SynthCircuit synthesize_two_qubit(const Matrix& u, const EntanglerOptions& o) {
  if (u.rows() != 4 || !is_unitary(u, 1e-8)) throw SynthesisError("two-qubit synthesis needs a 4x4 unitary");
  const bool cz_like = o.cz || o.cnot;
  if (!cz_like && !o.iswap && !o.cphase) throw SynthesisError("no supported two-qubit entangler available");

  struct Candidate {
    SynthCircuit circuit;
    double cost;
  };
  auto cost_of = [&](const SynthCircuit& c) {
    double total = 0;
    for (const auto& op : c) {
      if (op.kind == SynthOp::Kind::CZ) total += o.cz_cost;
      if (op.kind == SynthOp::Kind::ISWAP) total += o.iswap_cost;
      if (op.kind == SynthOp::Kind::CPHASE) total += o.cphase_cost;
    }
    return total;
  };

  if (auto c = synthesize_cz_exact(u, 0)) return *c;

  const Matrix sw = swap_matrix();
  for (int k = 1; k <= 3; ++k) {
    std::vector<Candidate> found;
    // CZ-type entanglers, with CPHASE(pi) standing in when only CPHASE is native.
    if (cz_like || o.cphase) {
      if (auto c = synthesize_cz_exact(u, k)) {
        SynthCircuit circuit = *c;
        if (!cz_like) {
          for (auto& op : circuit) {
            if (op.kind == SynthOp::Kind::CZ) op = SynthOp::make_entangler(SynthOp::Kind::CPHASE, 0, 1, kPi);
          }
        }
        found.push_back({circuit, cost_of(circuit)});
      }
    }
    if (o.iswap) {
      // ISWAP-only, then mixed CZ/ISWAP variants.
      std::vector<int> conversions = {k};
      if (cz_like) {
        for (int m = 1; m < k; ++m) conversions.push_back(m);
      }
      for (int m : conversions) {
        Matrix target = u;
        for (int j = 0; j < m; ++j) target = sw * target;
        if (auto c = synthesize_cz_exact(target, k)) {
          SynthCircuit circuit = convert_to_iswap(*c, m);
          if (equiv_up_to_phase(circuit_matrix(circuit, 2), u, 1e-9)) found.push_back({circuit, cost_of(circuit)});
        }
      }
    }
    if (o.cphase && k == 1) {
      if (auto mu = invariant_phases(u)) {
        bool done = false;
        for (size_t i = 0; i < mu->size() && !done; ++i) {
          const double m = (*mu)[i];
          for (double theta : {2 * m, -2 * m, 2 * m + kPi, -2 * m + kPi}) {
            SynthCircuit core = {SynthOp::make_entangler(SynthOp::Kind::CPHASE, 0, 1, wrap_angle(theta))};
            if (auto c = realize(u, core)) {
              found.push_back({*c, cost_of(*c)});
              done = true;
              break;
            }
          }
        }
      }
    }
    if (!found.empty()) {
      auto best = std::min_element(found.begin(), found.end(),
                                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost - 1e-12; });
      return best->circuit;
    }
  }
  throw SynthesisError("two-qubit synthesis failed to converge");
}

std::vector<GateApplication> to_gate_applications(const SynthCircuit& c) {
  std::vector<GateApplication> out;
  for (const auto& op : c) {
    switch (op.kind) {
      case SynthOp::Kind::Local: {
        const ZyzAngles a = zyz_decompose(op.local);
        const int q = op.qubits[0];
        if (std::abs(a.alpha) > 1e-12) out.push_back({"RZ", {a.alpha}, {q}});
        if (std::abs(a.beta) > 1e-12) out.push_back({"RY", {a.beta}, {q}});
        if (std::abs(a.gamma) > 1e-12) out.push_back({"RZ", {a.gamma}, {q}});
        break;
      }
      case SynthOp::Kind::CZ: out.push_back({"CZ", {}, op.qubits}); break;
      case SynthOp::Kind::CNOT: out.push_back({"CNOT", {}, op.qubits}); break;
      case SynthOp::Kind::ISWAP: out.push_back({"ISWAP", {}, op.qubits}); break;
      case SynthOp::Kind::CPHASE: out.push_back({"CPHASE", {op.angle}, op.qubits}); break;
    }
  }
  return out;
}

namespace {

// Replaces CZ(a,b) by H(b) CNOT(a,b) H(b).
SynthCircuit cz_to_cnot(const SynthCircuit& c) {
  SynthCircuit out;
  const Matrix h = h_matrix();
  for (const auto& op : c) {
    if (op.kind != SynthOp::Kind::CZ) {
      out.push_back(op);
      continue;
    }
    out.push_back(SynthOp::make_local(op.qubits[1], h));
    out.push_back(SynthOp::make_entangler(SynthOp::Kind::CNOT, op.qubits[0], op.qubits[1]));
    out.push_back(SynthOp::make_local(op.qubits[1], h));
  }
  return merge_locals(out);
}

}  // namespace

std::vector<GateApplication> kak_synthesize(const Matrix& u, const std::string& entangler) {
  EntanglerOptions o;
  if (entangler == "CZ") {
    o.cz = true;
  } else if (entangler == "CNOT") {
    o.cnot = true;
  } else if (entangler == "ISWAP") {
    o.iswap = true;
  } else {
    throw SynthesisError("unsupported entangler '" + entangler + "'");
  }
  SynthCircuit c = synthesize_two_qubit(u, o);
  if (entangler == "CNOT") c = cz_to_cnot(c);
  return to_gate_applications(c);
}

namespace {

// Exact synthesis of a diagonal unitary diag(exp(i phases)) on n qubits as
// RZ rotations and CNOT parity networks (global phase dropped).
void synthesize_diagonal(std::vector<double> phases, int n, SynthCircuit& out) {
  // Qubit n-1 is the least significant bit of the index.
  for (int level = n; level >= 1; --level) {
    const int target = level - 1;
    const int k = level - 1;  // controls are qubits 0..k-1
    const size_t groups = size_t{1} << k;
    std::vector<double> theta(groups), psi(groups);
    for (size_t c = 0; c < groups; ++c) {
      theta[c] = phases[2 * c + 1] - phases[2 * c];
      psi[c] = (phases[2 * c + 1] + phases[2 * c]) / 2;
    }
    // Walsh coefficients of the uniformly controlled rotation.
    std::vector<double> w(groups, 0.0);
    for (size_t s = 0; s < groups; ++s) {
      for (size_t c = 0; c < groups; ++c) {
        const int parity = std::popcount(s & c) & 1;
        w[s] += parity ? -theta[c] : theta[c];
      }
      w[s] /= static_cast<double>(groups);
    }
    bool only_constant = true;
    for (size_t s = 1; s < groups; ++s) {
      if (std::abs(wrap_angle(w[s])) > 1e-12) only_constant = false;
    }
    if (only_constant) {
      if (std::abs(wrap_angle(w[0] / 2) * 2) > 1e-12) out.push_back(SynthOp::make_local(target, rz(w[0])));
    } else {
      // Control index bit j (from the least significant end) is qubit k-1-j.
      auto gray = [](size_t i) { return i ^ (i >> 1); };
      for (size_t i = 0; i < groups; ++i) {
        const size_t g = gray(i);
        if (std::abs(wrap_angle(w[g] / 2) * 2) > 1e-12) out.push_back(SynthOp::make_local(target, rz(w[g])));
        const size_t next = gray((i + 1) % groups);
        const size_t diff = g ^ next;
        const int bit = std::countr_zero(diff);
        const int control = k - 1 - bit;
        out.push_back(SynthOp::make_entangler(SynthOp::Kind::CNOT, control, target));
      }
    }
    phases = psi;
  }
}

}  // namespace

SynthCircuit generic_synthesize_ops(const Matrix& u) {
  const long dim = u.rows();
  if (dim != u.cols() || dim < 4 || dim > 16 || (dim & (dim - 1)) != 0) {
    throw SynthesisError("generic synthesis supports 2 to 4 qubits");
  }
  if (!is_unitary(u, 1e-8)) throw SynthesisError("generic synthesis needs a unitary matrix");
  const int n = std::countr_zero(static_cast<unsigned long>(dim));
  auto gray = [](long i) { return i ^ (i >> 1); };
  // Work in Gray-code order so neighbouring rows differ in one bit.
  Matrix w(dim, dim);
  for (long r = 0; r < dim; ++r) {
    for (long c = 0; c < dim; ++c) w(r, c) = u(gray(r), gray(c));
  }
  struct Reflection {
    long row;  // acts on Gray positions row-1, row
    Matrix g;
  };
  std::vector<Reflection> reflections;
  for (long c = 0; c < dim - 1; ++c) {
    for (long r = dim - 1; r > c; --r) {
      const Complex a = w(r - 1, c);
      const Complex b = w(r, c);
      if (std::abs(b) < 1e-14) continue;
      const double rho = std::sqrt(std::norm(a) + std::norm(b));
      Matrix g(2, 2);
      g << std::conj(a) / rho, std::conj(b) / rho, b / rho, -a / rho;
      for (long j = 0; j < dim; ++j) {
        const Complex x = w(r - 1, j), y = w(r, j);
        w(r - 1, j) = g(0, 0) * x + g(0, 1) * y;
        w(r, j) = g(1, 0) * x + g(1, 1) * y;
      }
      reflections.push_back({r, g});
    }
  }
  // Now G_m ... G_1 U = D, so U = G_1^dag ... G_m^dag D.
  SynthCircuit out;
  {
    std::vector<double> phases(static_cast<size_t>(dim));
    for (long i = 0; i < dim; ++i) phases[static_cast<size_t>(gray(i))] = std::arg(w(i, i));
    synthesize_diagonal(phases, n, out);
  }
  for (auto it = reflections.rbegin(); it != reflections.rend(); ++it) {
    const long s0 = gray(it->row - 1), s1 = gray(it->row);
    const long diff = s0 ^ s1;
    const int bit = std::countr_zero(static_cast<unsigned long>(diff));
    const int target = n - 1 - bit;
    // Orient the 2x2 block as (target=0, target=1).
    Matrix g = it->g.adjoint();
    if (s0 & diff) {
      Matrix x(2, 2);
      x << 0, 1, 1, 0;
      g = x * g * x;
    }
    if (is_identity_up_to_phase(g, 1e-13) && std::abs(g(0, 0) - g(1, 1)) < 1e-13) continue;
    Eigen::ComplexEigenSolver<Matrix> es(g);
    Matrix q = es.eigenvectors();
    // g is normal; QR just cleans up the eigenvector basis.
    Eigen::HouseholderQR<Matrix> qr(q);
    Matrix qq = qr.householderQ();
    Matrix dd = qq.adjoint() * g * qq;
    std::vector<double> phases(static_cast<size_t>(dim), 0.0);
    const long pattern = s0 & ~diff;
    for (long x = 0; x < dim; ++x) {
      if ((x & ~diff) != pattern) continue;
      const int tb = (x & diff) ? 1 : 0;
      phases[static_cast<size_t>(x)] = std::arg(dd(tb, tb));
    }
    out.push_back(SynthOp::make_local(target, qq.adjoint()));
    synthesize_diagonal(phases, n, out);
    out.push_back(SynthOp::make_local(target, qq));
  }
  out = merge_locals(out);
  if (!equiv_up_to_phase(circuit_matrix(out, n), u, 1e-7)) {
    throw SynthesisError("generic synthesis failed verification");
  }
  return out;
}

std::vector<GateApplication> generic_synthesize(const Matrix& u) {
  return to_gate_applications(generic_synthesize_ops(u));
}

}  // namespace qcc
