#include "qcc/statesim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "qcc/errors.hpp"

namespace qcc {

namespace {

constexpr double kPi = std::numbers::pi;

StateAnnotation ground(int q) {
  Vector v = Vector::Zero(2);
  v(0) = 1;
  return {{q}, v};
}

StateAnnotation tensor(const StateAnnotation& a, const StateAnnotation& b) {
  StateAnnotation out;
  out.qubits = a.qubits;
  out.qubits.insert(out.qubits.end(), b.qubits.begin(), b.qubits.end());
  out.amplitudes = kron(a.amplitudes, b.amplitudes);
  return out;
}

int position(const StateAnnotation& s, int q) {
  auto it = std::find(s.qubits.begin(), s.qubits.end(), q);
  return it == s.qubits.end() ? -1 : static_cast<int>(it - s.qubits.begin());
}

void apply_gate(StateAnnotation& s, const GateApplication& g, const GateDefinitions& defs) {
  std::vector<int> pos;
  for (int q : g.qubits) pos.push_back(position(s, q));
  Matrix v = s.amplitudes;
  apply_matrix(v, gate_matrix(g, defs), pos, static_cast<int>(s.qubits.size()));
  s.amplitudes = v.col(0);
  s.amplitudes.normalize();
}

const GateDefinitions& defs_or_empty(const GateDefinitions* d) {
  static const GateDefinitions empty;
  return d ? *d : empty;
}

// Shortest native U with U|0> equal to `target` up to phase.
GateSeq prep_1q(const Vector& target, int q, const ChipSpecification& chip, const NativizeOptions& options) {
  const double beta = 2 * std::atan2(std::abs(target(1)), std::abs(target(0)));
  const double phi = std::abs(target(1)) < 1e-12 || std::abs(target(0)) < 1e-12
                         ? 0.0
                         : std::arg(target(1)) - std::arg(target(0));
  NativizeOptions o = options;
  o.verbatim_zyz = false;
  std::optional<GateSeq> best;
  // A leading RZ only changes the phase of |0>, so any of these will do.
  for (double x : {0.0, kPi / 2, -kPi / 2, kPi}) {
    const Matrix u = rz(phi) * ry(beta) * rz(x);
    auto s = synthesize_1q_native(u, q, chip, o);
    if (s && (!best || sequence_cost(*s, chip, o.cost) < sequence_cost(*best, chip, o.cost))) best = s;
  }
  if (!best) throw SynthesisError("qubit " + std::to_string(q) + " cannot prepare the requested state");
  return *best;
}

struct Group {
  StateAnnotation state;
  std::vector<size_t> gates;  // indices into the block
};

}  // namespace

const StateAnnotation* PartialState::component_of(int q) const {
  for (const auto& c : components) {
    if (position(c, q) >= 0) return &c;
  }
  return nullptr;
}

std::optional<StateAnnotation> PartialState::restrict_to(const std::vector<int>& qubits, int limit) const {
  std::optional<StateAnnotation> out;
  for (int q : qubits) {
    if (!tracked(q)) return std::nullopt;
    if (out && position(*out, q) >= 0) continue;
    const StateAnnotation* c = component_of(q);
    StateAnnotation part = c ? *c : ground(q);
    out = out ? tensor(*out, part) : part;
  }
  if (!out || static_cast<int>(out->qubits.size()) > limit) return std::nullopt;
  return out;
}

void PartialSimulator::forget(int q) {
  auto it = std::find_if(state_.components.begin(), state_.components.end(),
                         [&](const StateAnnotation& c) { return position(c, q) >= 0; });
  if (it != state_.components.end()) {
    for (int x : it->qubits) state_.unknown.insert(x);
    state_.components.erase(it);
  }
  state_.unknown.insert(q);
}

void PartialSimulator::apply(const Instruction& instr) {
  if (const auto* g = std::get_if<GateApplication>(&instr)) {
    auto merged = g->is_concrete() ? state_.restrict_to(g->qubits, limit_) : std::nullopt;
    if (!merged) {
      for (int q : g->qubits) forget(q);
      return;
    }
    std::erase_if(state_.components, [&](const StateAnnotation& c) {
      return std::any_of(c.qubits.begin(), c.qubits.end(), [&](int q) { return position(*merged, q) >= 0; });
    });
    apply_gate(*merged, *g, defs_or_empty(defs_));
    state_.components.push_back(std::move(*merged));
    return;
  }
  for (int q : instruction_qubits(instr)) forget(q);
}

std::vector<PartialState> partial_simulate(const std::vector<Instruction>& seq, int limit,
                                           const GateDefinitions* defs) {
  PartialSimulator sim(limit, defs);
  std::vector<PartialState> out;
  out.reserve(seq.size());
  for (const auto& instr : seq) {
    out.push_back(sim.state());
    sim.apply(instr);
  }
  return out;
}

bool acts_as_eigenvector(const GateApplication& g, const PartialState& state, int limit,
                         const GateDefinitions* defs) {
  if (!g.is_concrete()) return false;
  auto s = state.restrict_to(g.qubits, limit);
  if (!s) return false;
  StateAnnotation after = *s;
  apply_gate(after, g, defs_or_empty(defs));
  return collinear(s->amplitudes, after.amplitudes);
}

GateSeq state_prep_resynthesize(const Vector& target, const std::vector<int>& qubits,
                                const ChipSpecification& chip, const NativizeOptions& options) {
  if (qubits.size() == 1) {
    if (std::abs(target(1)) < 1e-12) return {};
    return prep_1q(target, qubits[0], chip, options);
  }
  if (qubits.size() != 2) throw SynthesisError("state preparation supports one or two qubits");
  const int a = qubits[0], b = qubits[1];
  Matrix m(2, 2);
  m << target(0), target(1), target(2), target(3);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const Matrix u = svd.matrixU();
  const Matrix v = svd.matrixV().conjugate();
  // target = sum_k s_k u_k (x) v_k
  GateSeq out;
  auto append = [&](const GateSeq& part) { out.insert(out.end(), part.begin(), part.end()); };
  if (s(1) < 1e-9) {
    if (std::abs(u(1, 0)) > 1e-12) append(prep_1q(u.col(0), a, chip, options));
    if (std::abs(v(1, 0)) > 1e-12) append(prep_1q(v.col(0), b, chip, options));
    return out;
  }
  if (!chip.adjacent(a, b)) throw AddressingError("state preparation needs adjacent qubits");
  // RY on a, then CNOT a b gives s0|00> + s1|11>; the local frames finish it.
  const double theta = 2 * std::atan2(s(1), s(0));
  NativizeOptions o = options;
  o.verbatim_zyz = false;
  const Matrix h = gate_matrix("H", {});
  // CNOT = (I x H) CZ (I x H); fold the Hadamards into the neighbouring locals.
  const Matrix pre_b = h;
  const Matrix post_b = v * h;
  auto sa = synthesize_1q_native(ry(theta), a, chip, o);
  auto sb = synthesize_1q_native(pre_b, b, chip, o);
  auto fa = synthesize_1q_native(u, a, chip, o);
  auto fb = synthesize_1q_native(post_b, b, chip, o);
  if (!sa || !sb || !fa || !fb) throw SynthesisError("cannot prepare the requested two-qubit state");
  append(*sa);
  append(*sb);
  GateSeq cz = nativize_gate({"CZ", {}, {a, b}}, chip, o);
  append(cz);
  append(*fa);
  append(*fb);
  return out;
}

GateSeq state_aware_pass(const GateSeq& seq, const ChipSpecification& chip, const NativizeOptions& options,
                         int limit, bool state_prep, StatePassStats* stats) {
  const GateDefinitions& defs = defs_or_empty(options.defs);
  const RewriteRule& elide = find_rule("elide-applications-on-eigenvectors");
  const RewriteRule& prep = find_rule("state-prep");
  RuleContext ctx{&chip, options, nullptr, state_prep};

  std::vector<bool> keep(seq.size(), true);
  std::vector<Group> groups;
  std::vector<Group> closed;
  std::set<int> unknown;
  auto group_of = [&](int q) -> int {
    for (size_t i = 0; i < groups.size(); ++i) {
      if (position(groups[i].state, q) >= 0) return static_cast<int>(i);
    }
    return -1;
  };
  auto close = [&](int q) {
    const int gi = group_of(q);
    if (gi >= 0) {
      for (int x : groups[static_cast<size_t>(gi)].state.qubits) unknown.insert(x);
      closed.push_back(std::move(groups[static_cast<size_t>(gi)]));
      groups.erase(groups.begin() + gi);
    }
    unknown.insert(q);
  };

  for (size_t i = 0; i < seq.size(); ++i) {
    const auto& g = seq[i];
    bool ok = g.is_concrete();
    for (int q : g.qubits) ok = ok && unknown.count(q) == 0;
    std::vector<int> members;
    StateAnnotation merged;
    if (ok) {
      for (int q : g.qubits) {
        const int gi = group_of(q);
        if (gi >= 0 && std::find(members.begin(), members.end(), gi) == members.end()) members.push_back(gi);
      }
      int size = 0;
      for (int gi : members) size += static_cast<int>(groups[static_cast<size_t>(gi)].state.qubits.size());
      for (int q : g.qubits) size += group_of(q) < 0 ? 1 : 0;
      ok = size <= limit;
    }
    if (!ok) {
      for (int q : g.qubits) close(q);
      continue;
    }
    Group next;
    bool first = true;
    for (int q : g.qubits) {
      if (!first && position(next.state, q) >= 0) continue;
      const int gi = group_of(q);
      StateAnnotation part = gi >= 0 ? groups[static_cast<size_t>(gi)].state : ground(q);
      next.state = first ? part : tensor(next.state, part);
      if (gi >= 0) {
        const auto& gs = groups[static_cast<size_t>(gi)].gates;
        next.gates.insert(next.gates.end(), gs.begin(), gs.end());
      }
      first = false;
    }
    ctx.state = &next.state;
    const GateApplication window[1] = {g};
    if (elide.apply(window, ctx)) {
      keep[i] = false;
      if (options.trace) options.trace->rule("state", elide.name, {g}, {});
      if (stats) stats->elided += 1;
      continue;
    }
    std::sort(members.begin(), members.end(), std::greater<>());
    for (int gi : members) groups.erase(groups.begin() + gi);
    apply_gate(next.state, g, defs);
    std::sort(next.gates.begin(), next.gates.end());
    next.gates.push_back(i);
    groups.push_back(std::move(next));
  }
  for (auto& g : groups) closed.push_back(std::move(g));

  std::map<size_t, GateSeq> inserts;
  if (state_prep) {
    for (const auto& c : closed) {
      GateSeq old;
      for (size_t i : c.gates) {
        if (keep[i]) old.push_back(seq[i]);
      }
      if (old.empty() || c.state.qubits.size() > 2) continue;
      if (c.state.qubits.size() == 2 && !chip.adjacent(c.state.qubits[0], c.state.qubits[1])) continue;
      ctx.state = &c.state;
      auto fresh = prep.apply(old, ctx);
      if (!fresh || !(sequence_cost(*fresh, chip, options.cost) < sequence_cost(old, chip, options.cost))) continue;
      if (options.trace) options.trace->rule("state", prep.name, old, *fresh);
      for (size_t i : c.gates) keep[i] = false;
      inserts[c.gates.back()] = *fresh;
      if (stats) stats->prepared += 1;
    }
  }

  GateSeq out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (auto it = inserts.find(i); it != inserts.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    if (keep[i]) out.push_back(seq[i]);
  }
  return out;
}

}  // namespace qcc
