#include "qcc/nativize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcc/errors.hpp"
#include "qcc/rules.hpp"

namespace qcc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCheck = 1e-9;
constexpr int kMaxDepth = 6;

bool is_diagonal(const Matrix& m, double tol = 1e-10) {
  return std::abs(m(0, 1)) < tol && std::abs(m(1, 0)) < tol;
}

double diag_angle(const Matrix& d) { return std::arg(d(1, 1) / d(0, 0)); }

// The 1Q gate set of one physical qubit, split by kind.
struct OneQubitSet {
  bool rz = false, rx = false, ry = false;
  double rz_cost = 0, rx_cost = 0, ry_cost = 0;
  struct Fixed {
    GateApplication gate;
    Matrix m;
    double cost;
  };
  std::vector<Fixed> fixed;
};

OneQubitSet gate_set(const ChipSpecification& chip, int q, CostMode mode) {
  OneQubitSet s;
  const auto* recs = chip.records({q});
  if (!recs) return s;
  for (const auto& r : *recs) {
    const double c = record_cost(r, mode);
    const bool wild = r.params.size() == 1 && !r.params[0];
    if (wild) {
      if (r.op == "RZ" && (!s.rz || c < s.rz_cost)) s.rz = true, s.rz_cost = c;
      if (r.op == "RX" && (!s.rx || c < s.rx_cost)) s.rx = true, s.rx_cost = c;
      if (r.op == "RY" && (!s.ry || c < s.ry_cost)) s.ry = true, s.ry_cost = c;
      continue;
    }
    GateApplication g{r.op, {}, {q}};
    for (const auto& p : r.params) g.params.emplace_back(*p);
    s.fixed.push_back({g, gate_matrix(g), c});
  }
  return s;
}

struct Candidate {
  GateSeq seq;
  double weight = 0;
};

double rz_free(double theta) { return std::remainder(theta, 2 * kPi); }

bool near_zero_angle(double theta) { return std::abs(rz_free(theta)) < 1e-10; }

GateApplication rot(const char* axis, double theta, int q) { return {axis, {wrap_pi(theta)}, {q}}; }

// Euler forms RZ(a) W(b) RZ(c) for W in {RX, RY} (or RX RY RX without RZ),
// skipping zero angles.
std::optional<Candidate> euler_form(const Matrix& u, int q, const OneQubitSet& s, bool keep_zeros) {
  ZyzAngles z;
  std::vector<std::pair<const char*, double>> parts;
  double cost_outer = 0, cost_mid = 0;
  if (s.rz && s.ry) {
    z = zyz_decompose(u);
    parts = {{"RZ", z.alpha}, {"RY", z.beta}, {"RZ", z.gamma}};
    cost_outer = s.rz_cost;
    cost_mid = s.ry_cost;
  } else if (s.rz && s.rx) {
    z = zyz_decompose(u);
    parts = {{"RZ", z.alpha - kPi / 2}, {"RX", z.beta}, {"RZ", z.gamma + kPi / 2}};
    cost_outer = s.rz_cost;
    cost_mid = s.rx_cost;
  } else if (s.rx && s.ry) {
    z = zyz_decompose(ry(-kPi / 2) * u * ry(kPi / 2));
    parts = {{"RX", z.alpha}, {"RY", z.beta}, {"RX", z.gamma}};
    cost_outer = s.rx_cost;
    cost_mid = s.ry_cost;
  } else {
    return std::nullopt;
  }
  Candidate c;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (!keep_zeros && near_zero_angle(parts[i].second)) continue;
    c.seq.push_back(rot(parts[i].first, parts[i].second, q));
    c.weight += i == 1 ? cost_mid : cost_outer;
  }
  return c;
}

// Angle b with |(g2 RZ(b) g1)_00| = target, both branches.
std::vector<double> middle_angles(const Matrix& g1, const Matrix& g2, double target) {
  const Complex a = g2(0, 0) * g1(0, 0);
  const Complex b = g2(0, 1) * g1(1, 0);
  const Complex ab = a * std::conj(b);
  const double r = std::abs(ab);
  const double rhs = target * target - std::norm(a) - std::norm(b);
  std::vector<double> out;
  if (r < 1e-12) {
    if (std::abs(rhs) < 1e-9) out.push_back(0.0);
    return out;
  }
  const double c = rhs / (2 * r);
  if (c < -1 - 1e-9 || c > 1 + 1e-9) return out;
  const double acos_c = std::acos(std::clamp(c, -1.0, 1.0));
  const double psi = std::arg(ab);
  // 2 r cos(psi - b) = rhs
  out.push_back(psi - acos_c);
  out.push_back(psi + acos_c);
  return out;
}

// u = RZ(c) f RZ(a) when the entry magnitudes agree.
std::optional<std::pair<double, double>> outer_angles(const Matrix& u, const Matrix& f) {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (std::abs(std::abs(u(i, j)) - std::abs(f(i, j))) > 1e-8) return std::nullopt;
    }
  }
  // Entry phases: p_ij = phi + (sign terms); pick a reference entry.
  double a = 0, c = 0;
  if (std::abs(f(0, 0)) > 1e-6 && std::abs(f(0, 1)) > 1e-6) {
    const double p00 = std::arg(u(0, 0) / f(0, 0));
    const double p01 = std::arg(u(0, 1) / f(0, 1));
    const double p10 = std::arg(u(1, 0) / f(1, 0));
    a = p01 - p00;
    c = p10 - p00;
  } else if (std::abs(f(0, 0)) > 1e-6) {
    // Diagonal f: only a + c is determined.
    const double p00 = std::arg(u(0, 0) / f(0, 0));
    const double p11 = std::arg(u(1, 1) / f(1, 1));
    a = p11 - p00;
  } else {
    const double p01 = std::arg(u(0, 1) / f(0, 1));
    const double p10 = std::arg(u(1, 0) / f(1, 0));
    c = p10 - p01;
  }
  return std::make_pair(a, c);
}

void consider(std::optional<Candidate>& best, Candidate c, const Matrix& u) {
  // Zero-angle rotations from the templates are dropped.
  std::erase_if(c.seq, [](const GateApplication& g) {
    return g.name.size() == 2 && g.name[0] == 'R' && g.params[0].is_concrete() &&
           std::abs(std::remainder(g.params[0].value(), 2 * kPi)) < 1e-10;
  });
  if (!equiv_up_to_phase(sequence_matrix(c.seq, {c.seq.empty() ? 0 : c.seq[0].qubits[0]}), u, kCheck)) return;
  if (!best || c.seq.size() < best->seq.size() ||
      (c.seq.size() == best->seq.size() && c.weight < best->weight - 1e-12)) {
    best = std::move(c);
  }
}

std::optional<Candidate> search_1q(const Matrix& u, int q, const OneQubitSet& s) {
  std::optional<Candidate> best;
  // 0 gates
  if (equiv_up_to_phase(u, Matrix::Identity(2, 2), kCheck)) return Candidate{};
  // 1 gate
  for (const auto& f : s.fixed) {
    if (equiv_up_to_phase(u, f.m, kCheck)) consider(best, {{f.gate}, f.cost}, u);
  }
  if (s.rz && is_diagonal(u)) consider(best, {{rot("RZ", diag_angle(u), q)}, s.rz_cost}, u);
  const Matrix h = gate_matrix("H", {});
  const Matrix sd = gate_matrix("S", {}).adjoint();
  if (s.rx) {
    const Matrix v = h * u * h;
    if (is_diagonal(v)) consider(best, {{rot("RX", diag_angle(v), q)}, s.rx_cost}, u);
  }
  if (s.ry) {
    const Matrix v = h * sd * u * sd.adjoint() * h;
    if (is_diagonal(v)) consider(best, {{rot("RY", diag_angle(v), q)}, s.ry_cost}, u);
  }
  if (best) return best;
  // 2 gates
  if (s.rz) {
    for (const auto& f : s.fixed) {
      const Matrix after = u * f.m.adjoint();  // u = RZ f
      if (is_diagonal(after)) consider(best, {{f.gate, rot("RZ", diag_angle(after), q)}, f.cost + s.rz_cost}, u);
      const Matrix before = f.m.adjoint() * u;  // u = f RZ
      if (is_diagonal(before)) consider(best, {{rot("RZ", diag_angle(before), q), f.gate}, f.cost + s.rz_cost}, u);
    }
  }
  if (auto e = euler_form(u, q, s, false); e && e->seq.size() <= 2) consider(best, *e, u);
  if (best) return best;
  // 3 gates
  if (auto e = euler_form(u, q, s, false)) consider(best, *e, u);
  if (s.rz) {
    for (const auto& f : s.fixed) {
      if (auto ac = outer_angles(u, f.m)) {
        consider(best, {{rot("RZ", ac->first, q), f.gate, rot("RZ", ac->second, q)}, f.cost + 2 * s.rz_cost}, u);
      }
    }
  }
  if (best) return best;
  // 5 gates: RZ g2 RZ(b) g1 RZ
  if (s.rz) {
    for (const auto& f1 : s.fixed) {
      for (const auto& f2 : s.fixed) {
        for (double b : middle_angles(f1.m, f2.m, std::abs(u(0, 0)))) {
          const Matrix mid = f2.m * rz(b) * f1.m;
          if (auto ac = outer_angles(u, mid)) {
            consider(best,
                     {{rot("RZ", ac->first, q), f1.gate, rot("RZ", b, q), f2.gate, rot("RZ", ac->second, q)},
                      f1.cost + f2.cost + 3 * s.rz_cost},
                     u);
          }
        }
      }
      if (best) break;
    }
  }
  return best;
}

GateSeq nativize_rec(const GateApplication& g, const ChipSpecification& chip, const NativizeOptions& o, int depth);

GateSeq nativize_all(const GateSeq& seq, const ChipSpecification& chip, const NativizeOptions& o, int depth) {
  GateSeq out;
  for (const auto& g : seq) {
    GateSeq part = nativize_rec(g, chip, o, depth + 1);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void log_rule(const NativizeOptions& o, const std::string& rule, const GateApplication& g, const GateSeq& out) {
  if (o.trace) o.trace->rule("nativize", rule, {g}, out);
}

bool has_cz_like(const EntanglerOptions& e) { return e.cz || e.cphase; }

// A and B with m = A (x) B up to phase, each unitary, when m is a product.
std::optional<std::pair<Matrix, Matrix>> kron_factors(const Matrix& m) {
  Matrix r(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r((i >> 1) * 2 + (j >> 1), (i & 1) * 2 + (j & 1)) = m(i, j);
  }
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) > 1e-9) return std::nullopt;
  Matrix x(2, 2), y(2, 2);
  const Matrix uu = svd.matrixU(), vv = svd.matrixV();
  for (int k = 0; k < 4; ++k) {
    x(k >> 1, k & 1) = uu(k, 0);
    y(k >> 1, k & 1) = std::conj(vv(k, 0));
  }
  x /= std::sqrt(std::abs(x.determinant()));
  y /= std::sqrt(std::abs(y.determinant()));
  if (!equiv_up_to_phase(kron(x, y), m, 1e-9)) return std::nullopt;
  return std::make_pair(x, y);
}

GateSeq emit_circuit(const SynthCircuit& c, const std::vector<int>& phys, const ChipSpecification& chip,
                     const NativizeOptions& o, int depth) {
  GateSeq out;
  NativizeOptions inner = o;
  inner.verbatim_zyz = false;
  inner.trace = nullptr;
  for (const auto& op : c) {
    if (op.kind == SynthOp::Kind::Local) {
      const int q = phys[static_cast<size_t>(op.qubits[0])];
      auto s = synthesize_1q_native(op.local, q, chip, inner);
      if (!s) throw SynthesisError("qubit " + std::to_string(q) + " has no native gates able to express a rotation");
      out.insert(out.end(), s->begin(), s->end());
      continue;
    }
    GateApplication g;
    const int a = phys[static_cast<size_t>(op.qubits[0])];
    const int b = phys[static_cast<size_t>(op.qubits[1])];
    switch (op.kind) {
      case SynthOp::Kind::CZ: g = {"CZ", {}, {a, b}}; break;
      case SynthOp::Kind::CNOT: g = {"CNOT", {}, {a, b}}; break;
      case SynthOp::Kind::ISWAP: g = {"ISWAP", {}, {a, b}}; break;
      case SynthOp::Kind::CPHASE: g = {"CPHASE", {wrap_pi(op.angle)}, {a, b}}; break;
      case SynthOp::Kind::Local: break;
    }
    if (chip.find_native(g)) {
      out.push_back(g);
    } else if (g.name == "CZ" && chip.find_native({"CPHASE", {kPi}, {a, b}})) {
      out.push_back({"CPHASE", {kPi}, {a, b}});
    } else {
      GateSeq sub = nativize_rec(g, chip, inner, depth + 1);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

GateSeq nativize_symbolic_1q(const GateApplication& g, const ChipSpecification& chip, const NativizeOptions& o,
                             int depth) {
  const int q = g.qubits[0];
  const auto s = gate_set(chip, q, o.cost);
  if (!s.rz) throw SynthesisError("no template for symbolic " + g.name + " without a native RZ on qubit " + std::to_string(q));
  const Matrix h = gate_matrix("H", {});
  const Matrix sg = gate_matrix("S", {});
  Matrix pre, post;
  if (g.name == "RX") {
    pre = h;
    post = h;
  } else if (g.name == "RY") {
    // RY(t) = S H RZ(t) H S^dag
    pre = h * sg.adjoint();
    post = sg * h;
  } else {
    throw SynthesisError("no template for symbolic " + g.name);
  }
  NativizeOptions inner = o;
  inner.verbatim_zyz = false;
  auto a = synthesize_1q_native(pre, q, chip, inner);
  auto b = synthesize_1q_native(post, q, chip, inner);
  if (!a || !b) throw SynthesisError("cannot express basis change on qubit " + std::to_string(q));
  GateSeq out = *a;
  out.push_back({"RZ", g.params, {q}});
  out.insert(out.end(), b->begin(), b->end());
  (void)depth;
  log_rule(o, "symbolic-rotation-conjugation", g, out);
  return out;
}

GateSeq nativize_rec(const GateApplication& g, const ChipSpecification& chip, const NativizeOptions& o, int depth) {
  if (depth > kMaxDepth) throw SynthesisError("nativization did not terminate for " + g.name);
  if (chip.find_native(g)) return {g};
  const size_t n = g.qubits.size();
  if (n >= 3) {
    GateSeq lowered = lower_multiqubit(g, o);
    return nativize_all(lowered, chip, o, depth);
  }
  for (int q : g.qubits) {
    if (!chip.has_qubit(q)) throw AddressingError("qubit " + std::to_string(q) + " is not on the chip");
  }
  if (n == 2 && !chip.adjacent(g.qubits[0], g.qubits[1])) {
    throw AddressingError("gate " + g.name + " acts on non-adjacent qubits " + std::to_string(g.qubits[0]) + " and " +
                          std::to_string(g.qubits[1]));
  }
  if (n == 2) {
    const EntanglerOptions e = link_entanglers(chip, g.qubits[0], g.qubits[1], o.cost);
    const int a = g.qubits[0], b = g.qubits[1];
    GateSeq templ;
    std::string rule;
    if (g.name == "CNOT" && has_cz_like(e)) {
      templ = cnot_to_cz(a, b);
      rule = "CNOT-to-CZ";
    } else if (g.name == "CZ" && !has_cz_like(e) && e.cnot) {
      // CZ is symmetric, so put the target where the chip's CNOT points.
      templ = chip.find_native({"CNOT", {}, {a, b}}) || !chip.find_native({"CNOT", {}, {b, a}}) ? cz_to_cnot(a, b)
                                                                                              : cz_to_cnot(b, a);
      rule = "CZ-to-CNOT";
    } else if (g.name == "SWAP" && (has_cz_like(e) || e.cnot)) {
      templ = swap_to_cnots(a, b);
      rule = "SWAP-to-3-entanglers";
    } else if (g.name == "CPHASE" && !e.cphase && (e.cz || e.cnot)) {
      templ = cphase_template(g.params[0], a, b);
      rule = "CPHASE-template";
    }
    if (!rule.empty()) {
      log_rule(o, rule, g, templ);
      return nativize_all(templ, chip, o, depth);
    }
  }
  if (!g.is_concrete()) {
    if (n == 1) return nativize_symbolic_1q(g, chip, o, depth);
    throw SynthesisError("no template for symbolic " + g.name + " on this chip");
  }
  const Matrix u = gate_matrix(g, o.defs ? *o.defs : GateDefinitions{});
  if (n == 1) {
    auto s = synthesize_1q_native(u, g.qubits[0], chip, o);
    if (!s) throw SynthesisError("qubit " + std::to_string(g.qubits[0]) + " cannot express " + g.name);
    log_rule(o, "euler-zyz-compiler", g, *s);
    return *s;
  }
  const SynthCircuit c = synthesize_two_qubit(u, link_entanglers(chip, g.qubits[0], g.qubits[1], o.cost));
  GateSeq out = emit_circuit(c, g.qubits, chip, o, depth);
  log_rule(o, "kak-compiler", g, out);
  return out;
}

}  // namespace

bool SeqCost::operator<(const SeqCost& o) const {
  if (two_qubit != o.two_qubit) return two_qubit < o.two_qubit;
  if (total != o.total) return total < o.total;
  return weight < o.weight - 1e-9 * std::max(1.0, std::abs(o.weight));
}

SeqCost sequence_cost(const GateSeq& seq, const ChipSpecification& chip, CostMode mode) {
  SeqCost c;
  for (const auto& g : seq) {
    c.total += 1;
    if (g.qubits.size() >= 2) c.two_qubit += 1;
    c.weight += gate_cost(chip, g, mode);
  }
  return c;
}

std::optional<GateSeq> synthesize_1q_native(const Matrix& u, int q, const ChipSpecification& chip,
                                            const NativizeOptions& options) {
  const OneQubitSet s = gate_set(chip, q, options.cost);
  if (options.verbatim_zyz && s.rz && s.ry) {
    const ZyzAngles z = zyz_decompose(u);
    return GateSeq{rot("RZ", z.alpha, q), rot("RY", z.beta, q), rot("RZ", z.gamma, q)};
  }
  auto best = search_1q(u, q, s);
  if (!best) return std::nullopt;
  return best->seq;
}

EntanglerOptions link_entanglers(const ChipSpecification& chip, int a, int b, CostMode mode) {
  EntanglerOptions e;
  const LinkRecord* l = chip.link(a, b);
  if (!l) return e;
  auto take = [&](bool& flag, double& cost, double c) {
    if (!flag || c < cost) cost = c;
    flag = true;
  };
  bool cnot_seen = false;
  double cnot_cost = 0;
  for (const auto& r : l->gates) {
    const double c = record_cost(r, mode);
    if (r.op == "CZ") take(e.cz, e.cz_cost, c);
    if (r.op == "ISWAP") take(e.iswap, e.iswap_cost, c);
    if (r.op == "CNOT") take(cnot_seen, cnot_cost, c);
    if (r.op == "CPHASE") {
      if (!r.params[0]) {
        take(e.cphase, e.cphase_cost, c);
      } else if (std::abs(std::remainder(*r.params[0] - kPi, 2 * kPi)) < 1e-10) {
        take(e.cz, e.cz_cost, c);
      }
    }
  }
  if (cnot_seen) {
    e.cnot = true;
    if (!e.cz) e.cz_cost = cnot_cost;
  }
  return e;
}

GateSeq synthesize_2q_native(const Matrix& u, int a, int b, const ChipSpecification& chip,
                             const NativizeOptions& options) {
  const EntanglerOptions e = link_entanglers(chip, a, b, options.cost);
  const SynthCircuit c = synthesize_two_qubit(u, e);
  GateSeq best = emit_circuit(c, {a, b}, chip, options, 0);
  if (entangler_count(c) != 1 || !has_cz_like(e)) return best;
  // One CZ with all the local work on a single side is often shorter.
  const Matrix cz = gate_matrix("CZ", {});
  const SeqCost best_cost = sequence_cost(best, chip, options.cost);
  for (bool cz_first : {true, false}) {
    const auto parts = kron_factors(cz_first ? Matrix(u * cz) : Matrix(cz * u));
    if (!parts) continue;
    SynthCircuit alt{SynthOp::make_local(0, parts->first), SynthOp::make_local(1, parts->second)};
    alt.insert(cz_first ? alt.begin() : alt.end(), SynthOp::make_entangler(SynthOp::Kind::CZ, 0, 1));
    GateSeq candidate = emit_circuit(alt, {a, b}, chip, options, 0);
    if (sequence_cost(candidate, chip, options.cost) < best_cost) best = std::move(candidate);
  }
  return best;
}

GateSeq nativize_gate(const GateApplication& g, const ChipSpecification& chip, const NativizeOptions& options) {
  return nativize_rec(g, chip, options, 0);
}

GateSeq lower_multiqubit(const GateApplication& g, const NativizeOptions& options) {
  if (g.qubits.size() < 3) return {g};
  if (g.qubits.size() > 4) throw SynthesisError(g.name + " acts on more than 4 qubits");
  if (options.ccnot_template && g.name == "CCNOT") {
    GateSeq out = ccnot_template(g.qubits[0], g.qubits[1], g.qubits[2]);
    if (options.trace) options.trace->rule("lower", "CCNOT-to-CNOT", {g}, out);
    return out;
  }
  if (!g.is_concrete()) throw SynthesisError("no template for symbolic " + g.name);
  const Matrix u = gate_matrix(g, options.defs ? *options.defs : GateDefinitions{});
  GateSeq local = generic_synthesize(u);
  GateSeq out;
  for (auto x : local) {
    for (int& q : x.qubits) q = g.qubits[static_cast<size_t>(q)];
    out.push_back(std::move(x));
  }
  if (options.trace) options.trace->rule("lower", "generic-synthesizer", {g}, out);
  return out;
}

bool all_native(const GateSeq& seq, const ChipSpecification& chip) {
  return std::all_of(seq.begin(), seq.end(), [&](const GateApplication& g) { return chip.find_native(g) != nullptr; });
}

}  // namespace qcc
